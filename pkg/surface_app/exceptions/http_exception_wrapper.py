from typing import Any

from fastapi import HTTPException

from .base import BaseError, ConfigError, LatticeError, NoCrossingError


def http_exception(status_code: int, msg: str, _input: Any = None) -> HTTPException:
    return HTTPException(
        status_code=status_code,
        detail={
            "msg": msg,
            "input": _input
        }
    )


def http_from_domain(error: BaseError, _input: Any = None) -> HTTPException:
    """Map a domain error onto the HTTP error the handlers report."""
    if isinstance(error, (ConfigError, LatticeError)):
        return http_exception(422, str(error), _input)
    if isinstance(error, NoCrossingError):
        return http_exception(409, str(error), _input)
    return http_exception(500, str(error), _input)
