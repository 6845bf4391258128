"""
Built-in generator families.

Each family supplies a pure, deterministic out-neighborhood function and
hand-verified metadata. Between them they cover every structural case:
NW empty, finite or infinite; V_infinity empty or not; recurrent and
transient matrices.
"""

import math
from abc import ABC, abstractmethod
from itertools import count
from typing import Dict, Iterator, List, Optional, Tuple

from .arithmetic import Number, convert, parse_number
from .errors import PreconditionError, UnknownFamilyError
from .graph import DeclaredMetadata, Edge, VertexId

# Relative slack separating a closed-form critical point from rounding noise
_EPS = 1e-12


def _as_int(v: VertexId) -> Optional[int]:
    try:
        i = int(v)
    except (TypeError, ValueError):
        return None
    return i if str(i) == v else None


class GeneratorFamily(ABC):
    """A parameterized infinite (or lazily enumerated) graph."""

    name: str = ""
    defaults: Dict[str, str] = {}
    integer_params: Tuple[str, ...] = ()

    def parse_params(self, raw: Dict[str, str], mode: str) -> Dict[str, Number]:
        """
        Resolve ``key=value`` tokens against the family defaults.

        Raises:
            ValueError: Unknown parameter or invalid value
        """
        unknown = set(raw) - set(self.defaults)
        if unknown:
            raise ValueError(f"Unknown parameter(s) for {self.name}: {sorted(unknown)}")
        params: Dict[str, Number] = {}
        for key, default in self.defaults.items():
            token = raw.get(key, default)
            if key in self.integer_params:
                value = _as_int(token)
                if value is None:
                    raise ValueError(f"{self.name}: {key} must be an integer, got {token!r}")
                params[key] = value
            else:
                params[key] = parse_number(token, mode)
        self.validate(params)
        return params

    def validate(self, params: Dict[str, Number]):
        """Family-specific parameter checks."""

    @abstractmethod
    def contains(self, params: Dict[str, Number], v: VertexId) -> bool:
        """Whether ``v`` names a vertex of the family."""

    @abstractmethod
    def neighbors(self, params: Dict[str, Number], v: VertexId, mode: str) -> Iterator[Edge]:
        """Out-neighborhood stream in a fixed order."""

    @abstractmethod
    def metadata(self, params: Dict[str, Number]) -> DeclaredMetadata:
        """Declared structural facts."""

    @abstractmethod
    def window(self, params: Dict[str, Number], radius: int) -> List[VertexId]:
        """Vertices within ``radius`` of the base vertex."""

    @abstractmethod
    def in_nw(self, params: Dict[str, Number], v: VertexId) -> bool:
        """Membership in the non-wandering set."""

    def lambda0(self, params: Dict[str, Number]) -> Optional[float]:
        """Closed form for exp(beta_0), when known."""
        return None

    def diagonal_green(self, params: Dict[str, Number], lam: float) -> Optional[float]:
        """Closed form of sum_n A^n_ww lam^-n at the witness (inf when divergent)."""
        return None

    def targets(self, params: Dict[str, Number], direction: str, n: int) -> List[VertexId]:
        """Default escaping target sequence in a boundary direction."""
        raise PreconditionError(f"{self.name} has no default target sequence '{direction}'")


class LoopFamily(GeneratorFamily):
    """One vertex ``v`` with a self-loop of weight ``a``."""

    name = "loop"
    defaults = {"a": "1"}

    def validate(self, params):
        if params["a"] <= 0:
            raise ValueError("loop: a must be positive")

    def contains(self, params, v):
        return v == "v"

    def neighbors(self, params, v, mode):
        yield "v", convert(params["a"], mode)

    def metadata(self, params):
        return DeclaredMetadata(cofinal=True, no_sinks=True, nw_kind="finite", witness="v")

    def window(self, params, radius):
        return ["v"]

    def in_nw(self, params, v):
        return True

    def lambda0(self, params):
        return float(params["a"])

    def diagonal_green(self, params, lam):
        a = float(params["a"])
        return 1.0 / (1.0 - a / lam) if lam > a * (1.0 + _EPS) else math.inf


class HalflineFamily(GeneratorFamily):
    """Vertices 0, 1, 2, ... with unit edges i -> i+1."""

    name = "halfline"
    defaults: Dict[str, str] = {}

    def contains(self, params, v):
        i = _as_int(v)
        return i is not None and i >= 0

    def neighbors(self, params, v, mode):
        yield str(int(v) + 1), convert(1, mode)

    def metadata(self, params):
        # Only tails {k, k+1, ...} are hereditary and none of them is saturated
        return DeclaredMetadata(cofinal=True, no_sinks=True, nw_kind="empty")

    def window(self, params, radius):
        return [str(i) for i in range(radius + 1)]

    def in_nw(self, params, v):
        return False

    def targets(self, params, direction, n):
        if direction != "+":
            raise PreconditionError("halfline only escapes in the '+' direction")
        return [str(k) for k in range(1, n + 1)]


class ZWalkFamily(GeneratorFamily):
    """Nearest-neighbour walk on the integers: i -> i+1 weight p, i -> i-1 weight q."""

    name = "zwalk"
    defaults = {"p": "1/2", "q": "1/2"}

    def validate(self, params):
        if params["p"] <= 0 or params["q"] <= 0:
            raise ValueError("zwalk: p and q must be positive")

    def contains(self, params, v):
        return _as_int(v) is not None

    def neighbors(self, params, v, mode):
        i = int(v)
        yield str(i + 1), convert(params["p"], mode)
        yield str(i - 1), convert(params["q"], mode)

    def metadata(self, params):
        return DeclaredMetadata(cofinal=True, no_sinks=True, nw_kind="infinite", witness="0")

    def window(self, params, radius):
        return [str(i) for i in range(-radius, radius + 1)]

    def in_nw(self, params, v):
        return True

    def lambda0(self, params):
        return 2.0 * math.sqrt(float(params["p"]) * float(params["q"]))

    def diagonal_green(self, params, lam):
        # sum_m C(2m, m) (pq)^m lam^-2m = (1 - 4pq / lam^2)^(-1/2)
        x = 4.0 * float(params["p"]) * float(params["q"]) / (lam * lam)
        return 1.0 / math.sqrt(1.0 - x) if x < 1.0 - _EPS else math.inf

    def targets(self, params, direction, n):
        if direction not in ("+", "-"):
            raise PreconditionError(f"zwalk direction must be '+' or '-', got {direction!r}")
        sign = 1 if direction == "+" else -1
        return [str(sign * k) for k in range(1, n + 1)]


class StarEmitterFamily(GeneratorFamily):
    """
    Infinite emitter ``u`` with edges u -> w_i of weight r^i and w_i -> u of weight 1.

    A^{2m}_{uu} = (r / (1 - r))^m, so exp(beta_0) = sqrt(r / (1 - r)).
    """

    name = "star_emitter"
    defaults = {"r": "1/2"}

    def validate(self, params):
        if not 0 < params["r"] < 1:
            raise ValueError("star_emitter: r must lie in (0, 1)")

    def contains(self, params, v):
        if v == "u":
            return True
        i = _as_int(v[1:]) if v.startswith("w") else None
        return i is not None and i >= 1

    def neighbors(self, params, v, mode):
        if v == "u":
            r = convert(params["r"], mode)
            weight = r
            for i in count(1):
                yield f"w{i}", weight
                weight = weight * r
        else:
            yield "u", convert(1, mode)

    def metadata(self, params):
        return DeclaredMetadata(
            cofinal=True, no_sinks=True, nw_kind="infinite", v_infinity=("u",), witness="u"
        )

    def window(self, params, radius):
        return ["u"] + [f"w{i}" for i in range(1, radius + 1)]

    def in_nw(self, params, v):
        return True

    def _ratio(self, params) -> float:
        r = float(params["r"])
        return r / (1.0 - r)

    def lambda0(self, params):
        return math.sqrt(self._ratio(params))

    def diagonal_green(self, params, lam):
        s = self._ratio(params) / (lam * lam)
        return 1.0 / (1.0 - s) if s < 1.0 - _EPS else math.inf

    def targets(self, params, direction, n):
        if direction != "+":
            raise PreconditionError("star_emitter escapes only along '+' (w1, w2, ...)")
        return [f"w{k}" for k in range(1, n + 1)]


class CycleWithTailFamily(GeneratorFamily):
    """Unit cycle c0 -> ... -> c(n-1) -> c0 fed by an infinite tail ... -> t2 -> t1 -> c0."""

    name = "cycle_with_tail"
    defaults = {"n": "3"}
    integer_params = ("n",)

    def validate(self, params):
        if params["n"] < 1:
            raise ValueError("cycle_with_tail: n must be at least 1")

    def contains(self, params, v):
        if v.startswith("c"):
            i = _as_int(v[1:])
            return i is not None and 0 <= i < params["n"]
        if v.startswith("t"):
            i = _as_int(v[1:])
            return i is not None and i >= 1
        return False

    def neighbors(self, params, v, mode):
        i = int(v[1:])
        if v.startswith("c"):
            yield f"c{(i + 1) % params['n']}", convert(1, mode)
        else:
            yield ("c0" if i == 1 else f"t{i - 1}"), convert(1, mode)

    def metadata(self, params):
        return DeclaredMetadata(cofinal=True, no_sinks=True, nw_kind="finite", witness="c0")

    def window(self, params, radius):
        return [f"c{i}" for i in range(params["n"])] + [f"t{i}" for i in range(1, radius + 1)]

    def in_nw(self, params, v):
        return v.startswith("c")

    def lambda0(self, params):
        return 1.0

    def diagonal_green(self, params, lam):
        return 1.0 / (1.0 - lam ** (-params["n"])) if lam > 1.0 + _EPS else math.inf


FAMILIES: Dict[str, GeneratorFamily] = {}


def register_family(family: GeneratorFamily) -> GeneratorFamily:
    """Register a host-supplied family (its neighbors function must be pure)."""
    if not family.name:
        raise ValueError("Family needs a name")
    FAMILIES[family.name] = family
    return family


def get_family(name: str) -> GeneratorFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownFamilyError(
            f"Unknown generator family {name!r}; known: {sorted(FAMILIES)}"
        ) from None


for _family in (LoopFamily(), HalflineFamily(), ZWalkFamily(), StarEmitterFamily(),
                CycleWithTailFamily()):
    register_family(_family)
