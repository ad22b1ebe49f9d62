"""Input records for the secant checkers, with validation and JSON I/O."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..elliptic import EllipticParams
from ..errors import ValidationError
from ..theta import SiegelMatrix, reduce_mod_lattice

__all__ = ["FlexData", "TangentData", "TrisecantData", "PrymQuadData", "CMState",
           "cvec", "cjson", "cload", "congruent"]


def cvec(v, g: int, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128).reshape(-1)
    if a.shape != (g,):
        raise ValidationError(f"{name} must have length {g}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def cjson(x):
    """Complex scalars and arrays as nested ``[re, im]`` pairs."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [cjson(v) for v in a]


def cload(obj):
    a = np.asarray(obj, dtype=float)
    if a.shape[-1:] != (2,):
        raise ValidationError("complex numbers are encoded as [re, im] pairs")
    out = a[..., 0] + 1j * a[..., 1]
    return complex(out) if out.ndim == 0 else out


def congruent(a, b, S: SiegelMatrix, box: int = 1, atol: float = 1e-9) -> bool:
    """Whether ``a = b`` modulo the lattice Z^g + B Z^g."""
    d = reduce_mod_lattice(np.asarray(a) - np.asarray(b), S)
    for m in itertools.product(range(-box, box + 1), repeat=S.g):
        for n in itertools.product(range(-box, box + 1), repeat=S.g):
            if np.linalg.norm(d - np.asarray(m) - S.B @ np.asarray(n)) < atol:
                return True
    return False


def _two_torsion(a, S: SiegelMatrix) -> bool:
    return congruent(2 * np.asarray(a), np.zeros(S.g), S)


@dataclass(frozen=True)
class _SecantData:
    B: SiegelMatrix
    U: np.ndarray
    V: np.ndarray
    A: np.ndarray
    p: complex
    E: complex

    def __post_init__(self):
        S = SiegelMatrix.coerce(self.B)
        object.__setattr__(self, "B", S)
        for k in ("U", "V", "A"):
            object.__setattr__(self, k, cvec(getattr(self, k), S.g, k))
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "E", complex(self.E))
        self._check()

    def _check(self):
        pass

    @property
    def g(self) -> int:
        return self.B.g

    def replace(self, **kw):
        fields = {k: getattr(self, k) for k in ("B", "U", "V", "A", "p", "E")}
        fields.update(kw)
        return type(self)(**fields)

    def to_json(self) -> dict:
        return {"type": type(self).__name__, "B": cjson(self.B.B), "U": cjson(self.U),
                "V": cjson(self.V), "A": cjson(self.A), "p": cjson(self.p), "E": cjson(self.E)}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(B=cload(obj["B"]), U=cload(obj["U"]), V=cload(obj["V"]), A=cload(obj["A"]),
                       p=cload(obj["p"]), E=cload(obj["E"]))
        except KeyError as e:
            raise ValidationError(f"missing field {e}") from None


class FlexData(_SecantData):
    """Data ``(B, U, V, A, p, E)`` of the flex (degenerate trisecant) problem."""

    def _check(self):
        if np.linalg.norm(self.U) <= 1e-10:
            raise ValidationError("U must be nonzero")


class TangentData(_SecantData):
    """Data of the tangent-trisecant (one continuous, one discrete variable) problem."""

    def _check(self):
        if congruent(self.U, self.A, self.B):
            raise ValidationError("U and A must be distinct modulo the lattice")


class TrisecantData(_SecantData):
    """Data of the fully discrete trisecant problem."""

    def _check(self):
        for a, b, na in ((self.U, self.V, "U,V"), (self.V, self.A, "V,A"), (self.A, self.U, "A,U")):
            if congruent(a, b, self.B):
                raise ValidationError(f"{na} must be distinct modulo the lattice")


@dataclass(frozen=True)
class PrymQuadData:
    """Quadrisecant data on a Prym-type period matrix."""

    B: SiegelMatrix
    A: np.ndarray
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    c1: complex
    c2: complex
    c3: complex
    w1: complex
    w2: complex
    w3: complex

    def __post_init__(self):
        S = SiegelMatrix.coerce(self.B)
        object.__setattr__(self, "B", S)
        for k in ("A", "U", "V", "W"):
            object.__setattr__(self, k, cvec(getattr(self, k), S.g, k))
        for k in ("c1", "c2", "c3", "w1", "w2", "w3"):
            v = complex(getattr(self, k))
            if v == 0:
                raise ValidationError(f"{k} must be nonzero")
            object.__setattr__(self, k, v)
        vecs = {"A": self.A, "U": self.U, "V": self.V, "W": self.W}
        for (na, a), (nb, b) in itertools.combinations(vecs.items(), 2):
            if congruent(a, b, S):
                raise ValidationError(f"{na} and {nb} must be distinct modulo the lattice")
        for na, a in vecs.items():
            if _two_torsion(a, S):
                raise ValidationError(f"{na} is a point of order two")

    @property
    def g(self) -> int:
        return self.B.g

    _FIELDS = ("A", "U", "V", "W", "c1", "c2", "c3", "w1", "w2", "w3")

    def replace(self, **kw):
        fields = {k: getattr(self, k) for k in ("B",) + self._FIELDS}
        fields.update(kw)
        return PrymQuadData(**fields)

    def to_json(self) -> dict:
        out = {"type": "PrymQuadData", "B": cjson(self.B.B)}
        out.update({k: cjson(getattr(self, k)) for k in self._FIELDS})
        return out

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(B=cload(obj["B"]), **{k: cload(obj[k]) for k in cls._FIELDS})
        except KeyError as e:
            raise ValidationError(f"missing field {e}") from None


@dataclass(frozen=True)
class CMState:
    """Positions and velocities of elliptic Calogero-Moser particles."""

    params: EllipticParams
    x: np.ndarray
    xdot: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.complex128).reshape(-1)
        xd = np.asarray(self.xdot, dtype=np.complex128).reshape(-1)
        if x.shape != xd.shape or x.size == 0:
            raise ValidationError("x and xdot must be nonempty and of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xdot", xd)
        if min_pair_distance(x, self.params) <= 1e-6:
            raise ValidationError("particle positions must be distinct modulo the lattice")

    @property
    def g(self) -> int:
        return self.x.size

    def to_json(self) -> dict:
        return {"type": "CMState", "params": self.params.to_json(), "x": cjson(self.x),
                "xdot": cjson(self.xdot)}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(EllipticParams.from_json(obj["params"]), cload(obj["x"]), cload(obj["xdot"]))
        except KeyError as e:
            raise ValidationError(f"missing field {e}") from None


def min_pair_distance(x, params: EllipticParams) -> float:
    best = np.inf
    for i, j in itertools.combinations(range(len(x)), 2):
        xr, _, _ = params.reduce(complex(x[i] - x[j]))
        best = min(best, abs(xr))
    return float(best)
