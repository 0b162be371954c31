"""Run configuration shared by every layer of the package.

A configuration fixes the prime p > 3, the residue degree f, the truncation
depth M (group = full group mod p^M-th powers, ring coefficients mod p), the
optional rescaling depth N with 1 <= N < M used by the integer- and
residue-scaled filtrations, the group case, and the seed for every sampled
check.  All derived objects (rings, group models, algebras) are keyed by it.
"""

from __future__ import annotations

import dataclasses

from .errors import ConfigError

CASES = ("GL2", "QUAT")


@dataclasses.dataclass(frozen=True)
class PrimeConfig:
    p: int
    f: int
    M: int
    case: str
    N: int | None = None
    seed: int = 0

    def __post_init__(self):
        from .padic import _is_prime

        if not _is_prime(self.p) or self.p <= 3:
            raise ConfigError(f"p must be a prime > 3, got {self.p}")
        if self.f < 1:
            raise ConfigError("f must be >= 1")
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        if self.case not in CASES:
            raise ConfigError(f"case must be one of {CASES}")
        if self.N is not None and not (1 <= self.N < self.M):
            raise ConfigError("N must satisfy 1 <= N < M")

    @property
    def dim(self) -> int:
        """Dimension of the group: 3f generators."""
        return 3 * self.f

    @property
    def group_order(self) -> int:
        return self.p ** (self.M * 3 * self.f)

    def require_N(self) -> int:
        if self.N is None:
            raise ConfigError("this operation needs the rescaling depth N")
        return self.N

    def header(self) -> dict:
        return {
            "p": self.p,
            "f": self.f,
            "M": self.M,
            "N": self.N,
            "case": self.case,
            "seed": self.seed,
        }

    @staticmethod
    def from_header(h: dict) -> "PrimeConfig":
        try:
            return PrimeConfig(
                p=int(h["p"]),
                f=int(h["f"]),
                M=int(h["M"]),
                case=str(h["case"]),
                N=None if h.get("N") is None else int(h["N"]),
                seed=int(h.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad configuration header: {e}") from e
