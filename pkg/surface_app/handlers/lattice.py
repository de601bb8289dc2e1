"""Lattice debug dump handler."""

from fastapi import Path, Query
from fastapi.responses import PlainTextResponse

from ..exceptions import BaseError
from ..exceptions.http_exception_wrapper import http_from_domain
from ..logic import surface_service
from ..schemas import LatticeVariant
from .routers import lattice_router


@lattice_router.get(
    "/{distance}",
    response_class=PlainTextResponse,
    description=(
            "Text grid of the lattice with data qubits (d<k>) and syndrome qubits (Z<k>, X<k>), "
            "followed by every stabilizer support and the logical operators."
    ),
)
async def get_lattice_dump(
        distance: int = Path(..., ge=2, description="Code distance, or faces per side for the all-smooth variant."),
        variant: LatticeVariant = Query(LatticeVariant.MIXED, description="mixed or all-smooth boundaries"),
) -> str:
    try:
        return surface_service.lattice_dump(distance, variant)
    except BaseError as e:
        raise http_from_domain(e, {"distance": distance, "variant": variant.value})
