"""Api routers are defined here."""

from fastapi import APIRouter

system_router = APIRouter(tags=["system"])
simulation_router = APIRouter(prefix="/simulation", tags=["simulation"])
lattice_router = APIRouter(prefix="/lattice", tags=["lattice"])
distillation_router = APIRouter(prefix="/distillation", tags=["distillation"])
logical_router = APIRouter(prefix="/logical", tags=["logical"])

routers = [simulation_router, lattice_router, distillation_router, logical_router, system_router]

__all__ = [
    "routers",
]
