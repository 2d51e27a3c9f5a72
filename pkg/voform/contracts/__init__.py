"""Contract model, validation and drafting."""

from voform.contracts.contract import (
    Contract,
    ContextEntry,
    ContractError,
    SameParty,
    draft_contract,
    make_contract_id,
    validate_contract,
)

__all__ = [
    'Contract', 'ContextEntry', 'ContractError', 'SameParty',
    'draft_contract', 'make_contract_id', 'validate_contract',
]
