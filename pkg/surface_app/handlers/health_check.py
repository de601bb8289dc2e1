"""health_check handler is defined here."""

from pathlib import Path

from fastapi.responses import FileResponse

from .. import config
from ..exceptions.http_exception_wrapper import http_exception
from .routers import system_router


@system_router.get(
    "/health_check/ping",
    response_model=dict,
)
async def health_check():
    """
    Return health check response.
    """
    return {"status": "ok"}


@system_router.get("/logs")
async def get_logs():
    """
    Return the application log file.
    """
    log_file = f"{config.get('LOG_FILE', 'surface_app')}.log"
    if not Path(log_file).exists():
        raise http_exception(
            status_code=404,
            msg="Log file not found",
            _input={"log_file_name": log_file},
        )
    return FileResponse(
        log_file,
        media_type="application/octet-stream",
        filename=log_file,
    )
