"""Resource caps shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


class CapExceeded(RuntimeError):
    """A configured resource bound was hit; callers fall back or report."""

    def __init__(self, cap: str, limit: int, needed: int | None = None):
        self.cap = cap
        self.limit = limit
        self.needed = needed
        msg = f"{cap} cap {limit} exceeded"
        if needed is not None:
            msg += f" (needed {needed})"
        super().__init__(msg)


@dataclass(frozen=True)
class Caps:
    enum: int = 10**7  # elements() enumeration
    orbit: int = 2_000_000  # conjugation orbits
    sylow_order: int = 3**8  # largest |S| whose subgroup lattice is enumerated
    lattice: int = 200_000  # number of subgroups in that lattice
    bfs_states: int = 10**8  # chain-closure state budget
    quotient: int = 10**4  # largest index materialised by coset action
    pairs: int = 10**4  # largest |G| for exhaustive pair checks
    scan: int = 10**6  # elements scanned by intersection

    def with_(self, **kw) -> "Caps":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CAPS = Caps()
