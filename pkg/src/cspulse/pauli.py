"""Pauli strings, weighted Pauli sums and the dense exact-diagonalization oracle.

Pauli strings are stored in the symplectic (x, z) bit representation.  The
textual form is big-endian: the leftmost character acts on qubit 0, which is
also the most significant bit of a computational-basis index.  A string with
bits (x, z) denotes the operator ``i^(x.z) X^x Z^z``, so that e.g. Y = iXZ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DimensionError, NormalizationError, OracleSizeError

ORACLE_LIMIT = 10
PRUNE_THRESHOLD = 1e-12

_PHASE_VALUES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)
_CHAR_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_CHAR = {v: k for k, v in _CHAR_BITS.items()}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, slots=True)
class Phase:
    """An element i^k of the group {+1, +i, -1, -i}, tracked exactly."""

    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 4)

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.k + other.k)

    def __neg__(self) -> "Phase":
        return Phase(self.k + 2)

    def __pow__(self, e: int) -> "Phase":
        return Phase(self.k * e)

    @property
    def value(self) -> complex:
        return _PHASE_VALUES[self.k]

    @property
    def is_real(self) -> bool:
        return self.k % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for real phases."""
        if not self.is_real:
            raise ValueError(f"phase {self} is imaginary")
        return 1 if self.k == 0 else -1

    def __repr__(self) -> str:
        return ("+1", "+i", "-1", "-i")[self.k]


@dataclass(frozen=True, slots=True)
class PauliString:
    """Phase-free Pauli string on ``n`` qubits.

    ``x`` and ``z`` are integers used as bit vectors; qubit ``q`` lives in
    bit ``n - 1 - q``.
    """

    x: int
    z: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise DimensionError(f"bits exceed qubit count {self.n}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for ch in label.upper():
            try:
                bx, bz = _CHAR_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(x, z, len(label))

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(0, 0, n)

    @classmethod
    def single(cls, n: int, qubit: int, char: str) -> "PauliString":
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for n={n}")
        bx, bz = _CHAR_BITS[char]
        bit = 1 << (n - 1 - qubit)
        return cls(bit * bx, bit * bz, n)

    @property
    def label(self) -> str:
        return "".join(self[q] for q in range(self.n))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    def __getitem__(self, qubit: int) -> str:
        bit = 1 << (self.n - 1 - qubit)
        return _BITS_CHAR[(int(bool(self.x & bit)), int(bool(self.z & bit)))]

    def __lt__(self, other: "PauliString") -> bool:
        return (self.n, self.label) < (other.n, other.label)

    @property
    def support_mask(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def support(self) -> list[int]:
        return [q for q in range(self.n) if self[q] != "I"]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def symplectic(self) -> int:
        """(x | z) packed into one 2n-bit integer, x in the high half."""
        return (self.x << self.n) | self.z

    @classmethod
    def from_symplectic(cls, v: int, n: int) -> "PauliString":
        full = (1 << n) - 1
        return cls((v >> n) & full, v & full, n)

    def remove_qubits(self, qubits: Iterable[int]) -> "PauliString":
        drop = set(qubits)
        return PauliString.from_label("".join(self[q] for q in range(self.n) if q not in drop))

    def insert_qubits(self, positions: Mapping[int, str], n_new: int) -> "PauliString":
        """Embed into ``n_new`` qubits, placing ``positions[q]`` at the given indices."""
        chars = iter(self.label)
        return PauliString.from_label(
            "".join(positions[q] if q in positions else next(chars) for q in range(n_new))
        )

    def __mul__(self, other: "PauliString") -> tuple[Phase, "PauliString"]:
        return multiply(self, other)


def _check_n(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise DimensionError(f"qubit count mismatch: {p.n} vs {q.n}")


def multiply(p: PauliString, q: PauliString) -> tuple[Phase, PauliString]:
    """Operator product ``p q`` as (phase, string)."""
    _check_n(p, q)
    x3, z3 = p.x ^ q.x, p.z ^ q.z
    k = _popcount(p.x & p.z) + _popcount(q.x & q.z) + 2 * _popcount(p.z & q.x) - _popcount(x3 & z3)
    return Phase(k), PauliString(x3, z3, p.n)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check_n(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def qubitwise_commutes(p: PauliString, q: PauliString) -> bool:
    _check_n(p, q)
    both = p.support_mask & q.support_mask
    return not (((p.x ^ q.x) | (p.z ^ q.z)) & both)


class PauliSum:
    """Real-weighted sum of Pauli strings on a fixed number of qubits.

    Construction merges duplicate strings and drops coefficients whose
    magnitude is below ``prune_threshold``.  Instances are not mutated after
    construction.
    """

    __slots__ = ("_terms", "n")

    def __init__(
        self,
        terms: Mapping[PauliString, float] | Iterable[tuple[PauliString, float]] = (),
        n: int | None = None,
        prune_threshold: float = PRUNE_THRESHOLD,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[PauliString, float] = {}
        for p, c in items:
            if n is None:
                n = p.n
            elif p.n != n:
                raise DimensionError(f"term {p} has {p.n} qubits, expected {n}")
            merged[p] = merged.get(p, 0.0) + _real(c)
        if n is None:
            raise DimensionError("qubit count must be given for an empty sum")
        self.n = n
        self._terms = {p: c for p, c in merged.items() if not abs(c) < prune_threshold}

    @classmethod
    def from_labels(cls, terms: Mapping[str, float] | Iterable[tuple[str, float]], n: int | None = None,
                    prune_threshold: float = PRUNE_THRESHOLD) -> "PauliSum":
        items = terms.items() if isinstance(terms, Mapping) else terms
        return cls(((PauliString.from_label(s), c) for s, c in items), n=n, prune_threshold=prune_threshold)

    @classmethod
    def constant(cls, value: float, n: int) -> "PauliSum":
        return cls({PauliString.identity(n): value}, n=n)

    @property
    def terms(self) -> Mapping[PauliString, float]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_items(self) -> list[tuple[PauliString, float]]:
        return sorted(self._terms.items(), key=lambda t: t[0].label)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._terms)

    def __contains__(self, p: PauliString) -> bool:
        return p in self._terms

    def coefficient(self, p: PauliString) -> float:
        return self._terms.get(p, 0.0)

    @property
    def identity_coefficient(self) -> float:
        return self._terms.get(PauliString.identity(self.n), 0.0)

    def without_identity(self) -> "PauliSum":
        return PauliSum({p: c for p, c in self._terms.items() if not p.is_identity}, n=self.n)

    def _check(self, other: "PauliSum") -> None:
        if self.n != other.n:
            raise DimensionError(f"qubit count mismatch: {self.n} vs {other.n}")

    def add(self, other: "PauliSum", prune_threshold: float = PRUNE_THRESHOLD) -> "PauliSum":
        self._check(other)
        return PauliSum(list(self._terms.items()) + list(other._terms.items()), n=self.n,
                        prune_threshold=prune_threshold)

    def scale(self, factor: float) -> "PauliSum":
        return PauliSum({p: factor * c for p, c in self._terms.items()}, n=self.n)

    def prune(self, threshold: float = PRUNE_THRESHOLD) -> "PauliSum":
        return PauliSum(self._terms, n=self.n, prune_threshold=threshold)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return self.add(other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self.add(-other)

    def __neg__(self) -> "PauliSum":
        return self.scale(-1.0)

    def __mul__(self, factor: float) -> "PauliSum":
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __repr__(self) -> str:
        body = ", ".join(f"{p.label}: {c:.6g}" for p, c in self.sorted_items()[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"PauliSum(n={self.n}, {{{body}{more}}})"

    def norm1(self) -> float:
        return sum(abs(c) for c in self._terms.values())

    def to_matrix(self, max_qubits: int = ORACLE_LIMIT) -> np.ndarray:
        return to_matrix(self, max_qubits)


def _real(c) -> float:
    if isinstance(c, complex):
        if abs(c.imag) > PRUNE_THRESHOLD:
            raise ValueError(f"coefficient {c} is not real; only Hermitian real-weighted sums are supported")
        return float(c.real)
    return float(c)


def rotate(h: PauliSum, generator: PauliString, angle: float) -> PauliSum:
    """Conjugate ``h`` by ``U = exp(i * angle * generator)``, returning ``U^dag h U``.

    Anticommuting terms Q map to cos(2a) Q + sin(2a) iQP; the Clifford angle
    pi/4 is special-cased so no cos(pi/2) residue appears.
    """
    if h.n != generator.n:
        raise DimensionError(f"qubit count mismatch: {h.n} vs {generator.n}")
    clifford = math.isclose(angle % (math.pi / 2), math.pi / 4, abs_tol=1e-15)
    c2, s2 = math.cos(2 * angle), math.sin(2 * angle)
    if clifford:
        c2, s2 = 0.0, round(s2)
    out: list[tuple[PauliString, float]] = []
    for q, c in h.items():
        if commutes(q, generator):
            out.append((q, c))
            continue
        phase, r = multiply(q, generator)
        # i * phase is real because q and generator anticommute
        out.append((r, c * s2 * (Phase(1) * phase).sign))
        if c2 != 0.0:
            out.append((q, c * c2))
    return PauliSum(out, n=h.n)


def rotate_string(p: PauliString, generator: PauliString, angle: float = math.pi / 4) -> tuple[int, PauliString]:
    """Clifford conjugation of a single string: returns (sign, image)."""
    if commutes(p, generator):
        return 1, p
    if not math.isclose(angle % (math.pi / 2), math.pi / 4, abs_tol=1e-15):
        raise ValueError("single-string conjugation needs a Clifford angle")
    phase, r = multiply(p, generator)
    return round(math.sin(2 * angle)) * (Phase(1) * phase).sign, r


# ----------------------------------------------------------------------------
# dense oracle


def _parity(v: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(v) & 1).astype(np.int64)


def to_matrix(h: PauliSum, max_qubits: int = ORACLE_LIMIT) -> np.ndarray:
    """Dense 2^n x 2^n matrix of ``h``."""
    if h.n > max_qubits:
        raise OracleSizeError(f"{h.n} qubits exceeds the dense oracle limit of {max_qubits}")
    dim = 1 << h.n
    idx = np.arange(dim, dtype=np.int64)
    m = np.zeros((dim, dim), dtype=complex)
    for p, c in h.items():
        vals = c * (1j ** _popcount(p.x & p.z)) * (1 - 2 * _parity(idx & p.z))
        m[idx ^ p.x, idx] += vals
    return m


def from_matrix(m: np.ndarray, prune_threshold: float = PRUNE_THRESHOLD) -> PauliSum:
    """Pauli decomposition of a Hermitian matrix (coefficient = Tr(P M) / 2^n)."""
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.shape != (dim, dim) or 1 << n != dim:
        raise DimensionError("matrix must be square with power-of-two size")
    idx = np.arange(dim, dtype=np.int64)
    terms = []
    for x in range(dim):
        # column b of P has its entry at row b^x; Tr(P M) = sum_b P[b^x, b] M[b, b^x]
        diag = m[idx, idx ^ x]
        for z in range(dim):
            val = (1j ** _popcount(x & z)) * np.dot(1 - 2 * _parity(idx & z), diag) / dim
            if abs(val.imag) > 1e-9:
                raise ValueError("matrix is not Hermitian")
            if abs(val.real) >= prune_threshold:
                terms.append((PauliString(x, z, n), val.real))
    return PauliSum(terms, n=n, prune_threshold=prune_threshold)


def exact_ground(h: PauliSum, max_qubits: int = ORACLE_LIMIT) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue of ``h`` and a unit eigenvector for it."""
    if h.n == 0:
        return h.identity_coefficient, np.ones(1, dtype=complex)
    w, v = np.linalg.eigh(to_matrix(h, max_qubits))
    vec = v[:, 0]
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    return float(w[0]), vec


def spectrum(h: PauliSum, max_qubits: int = ORACLE_LIMIT) -> np.ndarray:
    if h.n == 0:
        return np.array([h.identity_coefficient])
    return np.linalg.eigvalsh(to_matrix(h, max_qubits))


def check_state(state: np.ndarray, n: int, atol: float = 1e-10) -> None:
    if state.shape != (1 << n,):
        raise DimensionError(f"state of shape {state.shape} does not match {n} qubits")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > atol:
        raise NormalizationError(f"state norm {norm!r} differs from 1")


def apply_pauli(p: PauliString, state: np.ndarray) -> np.ndarray:
    idx = np.arange(state.shape[0], dtype=np.int64)
    out = np.empty_like(state, dtype=complex)
    out[idx ^ p.x] = (1j ** _popcount(p.x & p.z)) * (1 - 2 * _parity(idx & p.z)) * state
    return out


def pauli_expectation(p: PauliString, state: np.ndarray) -> float:
    idx = np.arange(state.shape[0], dtype=np.int64)
    signs = 1 - 2 * _parity(idx & p.z)
    val = (1j ** _popcount(p.x & p.z)) * np.vdot(state[idx ^ p.x], signs * state)
    return float(val.real)


def expectation(h: PauliSum, state: np.ndarray) -> float:
    """Real part of <state|h|state>, checked to be real."""
    check_state(state, h.n)
    total = 0j
    idx = np.arange(state.shape[0], dtype=np.int64)
    for p, c in h.items():
        signs = 1 - 2 * _parity(idx & p.z)
        total += c * (1j ** _popcount(p.x & p.z)) * np.vdot(state[idx ^ p.x], signs * state)
    if abs(total.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {total.imag}")
    return float(total.real)
