"""Contract function registry: the fixed on-wire function names."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import UNKNOWN_FUNCTION, LedgerError
from . import functions
from .context import TxContext


@dataclass(frozen=True)
class ContractFunction:
    name: str
    handler: Callable[[TxContext, list], object]
    readonly: bool


class ContractRegistry:
    def __init__(self):
        self._functions: dict[str, ContractFunction] = {}

    def register(self, name: str, handler, readonly: bool = False) -> None:
        self._functions[name] = ContractFunction(name, handler, readonly)

    def resolve(self, name: str) -> ContractFunction:
        try:
            return self._functions[name]
        except KeyError:
            raise LedgerError(UNKNOWN_FUNCTION, f"no contract function {name!r}") from None

    def names(self) -> list[str]:
        return sorted(self._functions)


def default_registry() -> ContractRegistry:
    reg = ContractRegistry()
    reg.register("RegisterClassic", functions.register_classic)
    reg.register("AddRestorationStep", functions.add_restoration_step)
    reg.register("AddDocument", functions.add_document)
    reg.register("CertifyVehicle", functions.certify_vehicle)
    reg.register("GrantAccess", functions.grant_access)
    reg.register("RevokeAccess", functions.revoke_access)
    reg.register("TransferOwnership", functions.transfer_ownership)
    reg.register("AnchorMedia", functions.anchor_media)
    reg.register("GetVehicleCard", functions.get_vehicle_card, readonly=True)
    reg.register("GetVehicleCardHistory", functions.get_vehicle_card_history, readonly=True)
    reg.register("ListClassicsForUser", functions.list_classics_for_user, readonly=True)
    return reg
