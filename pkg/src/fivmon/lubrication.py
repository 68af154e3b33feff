"""Contact mechanics and lubrication-regime calculator.

All arithmetic is in SI units. Surface roughness is taken in micrometres
(the unit it is measured in) and converted where it meets film thickness.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional


class LubricationError(ValueError):
    pass


class Regime(str, Enum):
    BOUNDARY = "boundary"
    MIXED = "mixed"
    FLUID = "fluid"


@dataclass(frozen=True)
class SurfacePair:
    sigma1: float  # um, ball
    sigma2: float  # um, disk

    def __post_init__(self):
        for name in ("sigma1", "sigma2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise LubricationError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class ContactSpec:
    """Ball-on-disk contact parameters.

    Attributes
    ----------
    Ra, Rb : float
        Radii of curvature in m. ``Rb`` may be ``math.inf`` for a flat.
    Ea, Eb : float
        Elastic moduli in Pa.
    nu_a, nu_b : float
        Poisson's ratios.
    k_ellipticity : float
        Ellipticity parameter (1 for a circular point contact).
    eta : float
        Absolute lubricant viscosity in Pa s.
    mu_entrain : float
        Mean (entrainment) velocity in m/s.
    P_load : float
        Normal load in N.
    """

    Ra: float = 3e-3
    Rb: float = math.inf
    Ea: float = 208e9
    Eb: float = 209e9
    nu_a: float = 0.3
    nu_b: float = 0.269
    k_ellipticity: float = 1.0
    eta: float = 0.139
    mu_entrain: float = 0.0333
    P_load: float = 100.0

    def __post_init__(self):
        checks = {
            "Ra": self.Ra > 0 and math.isfinite(self.Ra),
            "Rb": self.Rb > 0,
            "Ea": self.Ea > 0 and math.isfinite(self.Ea),
            "Eb": self.Eb > 0 and math.isfinite(self.Eb),
            "nu_a": 0 < self.nu_a < 0.5,
            "nu_b": 0 < self.nu_b < 0.5,
            "eta": self.eta > 0,
            "mu_entrain": self.mu_entrain > 0,
            "P_load": self.P_load > 0,
            "k_ellipticity": math.isfinite(self.k_ellipticity) and self.k_ellipticity > 0,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise LubricationError(f"invalid contact parameters: {', '.join(bad)}")


@dataclass(frozen=True)
class LubricationReport:
    sigma1_um: float
    sigma2_um: float
    sigma_c_um: float
    R_composite: float
    E_composite: float
    h_min: float
    h_min_formula: float
    h_min_overridden: bool
    lambda_ratio: float
    regime: Regime

    @property
    def sigma_c_m(self) -> float:
        return self.sigma_c_um * 1e-6

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        d["sigma_c_m"] = self.sigma_c_m
        d["h_min_nm"] = self.h_min * 1e9
        d["E_composite_GPa"] = self.E_composite / 1e9
        return d


def composite_roughness(pair: SurfacePair) -> float:
    """Root-sum-square roughness in um."""
    return math.hypot(pair.sigma1, pair.sigma2)


def composite_radius(spec: ContactSpec) -> float:
    if math.isinf(spec.Rb):
        return spec.Ra
    return 1.0 / (1.0 / spec.Ra + 1.0 / spec.Rb)


def composite_modulus(spec: ContactSpec) -> float:
    """E* = 2 / [(1-nu_a^2)/Ea + (1-nu_b^2)/Eb] (Hamrock-Dowson convention)."""
    return 2.0 / ((1 - spec.nu_a ** 2) / spec.Ea + (1 - spec.nu_b ** 2) / spec.Eb)


def hamrock_dowson_hmin(spec: ContactSpec) -> float:
    """Minimum film thickness in m.

    h = 7.43 R (1 - 0.85 exp(-0.31 k)) (eta u / (E* R))^0.65 (P / (E* R^2))^-0.21
    """
    R = composite_radius(spec)
    E = composite_modulus(spec)
    speed_group = spec.eta * spec.mu_entrain / (E * R)
    load_group = spec.P_load / (E * R ** 2)
    ellipticity = 1 - 0.85 * math.exp(-0.31 * spec.k_ellipticity)
    if speed_group <= 0 or load_group <= 0 or ellipticity <= 0:
        raise LubricationError("non-positive dimensionless group")
    return 7.43 * R * ellipticity * speed_group ** 0.65 * load_group ** -0.21


def film_thickness_ratio(h_min: float, sigma_c: float) -> float:
    """lambda = h_min / sigma_c with h_min in m and sigma_c in um."""
    if not (h_min > 0 and sigma_c > 0):
        raise LubricationError("film thickness and roughness must be positive")
    return h_min / (sigma_c * 1e-6)


def classify_regime(lambda_ratio: float) -> Regime:
    """Boundary below 1, fluid above 3; both edges count as mixed."""
    if not lambda_ratio > 0:
        raise LubricationError(f"lambda must be positive, got {lambda_ratio!r}")
    if lambda_ratio < 1:
        return Regime.BOUNDARY
    if lambda_ratio <= 3:
        return Regime.MIXED
    return Regime.FLUID


@dataclass(frozen=True)
class HertzContact:
    contact_radius: float  # m
    p_max: float  # Pa
    p_mean: float  # Pa
    reduced_modulus: float  # Pa


def hertz_max_pressure(spec: ContactSpec) -> HertzContact:
    """Sphere-on-flat Hertz contact.

    Uses the standard reduced modulus 1/E' = sum (1-nu^2)/E, which is E*/2
    in the convention of :func:`composite_modulus`.
    """
    e_red = composite_modulus(spec) / 2
    R = composite_radius(spec)
    a = (3 * spec.P_load * R / (4 * e_red)) ** (1 / 3)
    p_mean = spec.P_load / (math.pi * a ** 2)
    return HertzContact(a, 1.5 * p_mean, p_mean, e_red)


def reciprocating_velocities(stroke: float, rpm: float) -> tuple[float, float]:
    """Mean sliding speed and entrainment speed for a reciprocating stage.

    Each crank revolution covers the stroke twice. The entrainment speed is
    half the sliding speed because the ball is stationary.
    """
    if not (stroke > 0 and rpm > 0):
        raise LubricationError("stroke and rpm must be positive")
    sliding = 2 * stroke * rpm / 60
    return sliding, sliding / 2


def lubrication_report(pair: SurfacePair, spec: ContactSpec,
                       h_min_override: Optional[float] = None) -> LubricationReport:
    sigma_c = composite_roughness(pair)
    h_formula = hamrock_dowson_hmin(spec)
    h = h_formula if h_min_override is None else float(h_min_override)
    lam = film_thickness_ratio(h, sigma_c)
    return LubricationReport(
        sigma1_um=pair.sigma1, sigma2_um=pair.sigma2, sigma_c_um=sigma_c,
        R_composite=composite_radius(spec), E_composite=composite_modulus(spec),
        h_min=h, h_min_formula=h_formula, h_min_overridden=h_min_override is not None,
        lambda_ratio=lam, regime=classify_regime(lam),
    )


# parameter-file key -> ContactSpec / SurfacePair field
PARAM_KEYS = {
    "k": "k_ellipticity",
    "eta": "eta",
    "mu": "mu_entrain",
    "P": "P_load",
    "Ra": "Ra",
    "Rb": "Rb",
    "nu_a": "nu_a",
    "nu_b": "nu_b",
    "Ea": "Ea",
    "Eb": "Eb",
    "sigma1": "sigma1",
    "sigma2": "sigma2",
}
REQUIRED_KEYS = tuple(PARAM_KEYS)

_UNITS = {
    "": 1.0, "m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9,
    "pa": 1.0, "kpa": 1e3, "mpa": 1e6, "gpa": 1e9,
    "n": 1.0, "pa·s": 1.0, "pa*s": 1.0, "pa.s": 1.0, "pas": 1.0, "m/s": 1.0,
}


def parse_quantity(text: str, key: str = "") -> float:
    """Parse ``"3 mm"``, ``"208GPa"``, ``"inf"`` etc. into SI.

    Roughness keys (``sigma*``) are returned in um; a bare number is taken
    to be um already.
    """
    s = text.strip()
    if s.lower() in ("inf", "infinite", "infinity"):
        return math.inf
    num, unit = s, ""
    for i, ch in enumerate(s):
        if ch.isalpha() or ch == "µ":
            # allow exponents like 2.08e11
            if ch in "eE" and i + 1 < len(s) and (s[i + 1].isdigit() or s[i + 1] in "+-"):
                continue
            num, unit = s[:i], s[i:].strip()
            break
    try:
        value = float(num)
    except ValueError:
        raise LubricationError(f"cannot parse value for {key!r}: {text!r}") from None
    u = unit.lower()
    if u not in _UNITS:
        raise LubricationError(f"unknown unit {unit!r} for {key!r}")
    si = value * _UNITS[u]
    if key.startswith("sigma") and u:
        return si * 1e6
    return si


def parse_params_text(text: str) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise LubricationError(f"line {lineno}: expected key = value")
        out[key.strip()] = value.strip()
    return out


def build_inputs(params: dict) -> tuple[SurfacePair, ContactSpec, Optional[float]]:
    missing = [k for k in REQUIRED_KEYS if k not in params]
    if missing:
        raise LubricationError(f"missing parameter keys: {', '.join(missing)}")
    values = {}
    for key, attr in PARAM_KEYS.items():
        v = params[key]
        values[attr] = float(v) if isinstance(v, (int, float)) else parse_quantity(str(v), key)
    pair = SurfacePair(values.pop("sigma1"), values.pop("sigma2"))
    spec = ContactSpec(**values)
    override = params.get("h_min")
    if override is not None and not isinstance(override, (int, float)):
        override = parse_quantity(str(override), "h_min")
    return pair, spec, override
