"""Bichromatic drive description, CPT states, and excitation-scheme topology.

The drive is exactly two optical frequencies, one addressing each ground
hyperfine manifold; each carries sigma+ and sigma- with amplitudes from the
linear-polarization decomposition (the beam propagates along the magnetic
field, so there is no pi component).  The ``sigma_minus_phase`` knob is the
differential phase of the sigma- polarization between the two frequency
components (a push-pull delay line): it is the only phase that survives in
the closed-loop coupling ratio, and pi of it turns the non-absorbing m = 0
double-lambda configuration into a CPT-capable one.  It is applied to the
sigma- channel of the upper-manifold frequency.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .angular import HalfInt
from .atom import AtomSpec, Level, clock_splitting, dipole_element

__all__ = [
    "FieldComponent",
    "DriveConfig",
    "LambdaScheme",
    "CptState",
    "MW_CM2_TO_ERG",
    "intensity_to_amplitude",
    "amplitude_to_intensity",
    "decompose_linear_polarization",
    "fields_from_drive",
    "cpt_state",
    "classify_scheme",
]

# 1 mW/cm^2 in erg s^-1 cm^-2
MW_CM2_TO_ERG = 1.0e4


@dataclass(frozen=True)
class FieldComponent:
    """One optical frequency/polarization channel of the drive.

    ``optical_detuning`` is measured from the (addressed ground manifold ->
    excited lower-F centroid) transition; ``amplitude`` is the complex field
    amplitude in statvolt/cm for E(t) = Re[amplitude * exp(-i w t)].
    """

    couples_f_g: HalfInt
    optical_detuning: float   # [rad/s]
    q: int                    # +1 (sigma+) or -1 (sigma-)
    amplitude: complex

    def __post_init__(self):
        if self.q not in (-1, +1):
            raise ValueError(f"polarization q must be +-1, got {self.q}")
        if not (math.isfinite(self.amplitude.real)
                and math.isfinite(self.amplitude.imag)):
            raise ValueError("field amplitude must be finite")


@dataclass(frozen=True)
class DriveConfig:
    """Input-face drive parameters.

    ``raman_detuning`` is the difference between the frequency splitting of
    the two optical components and the 0-0 working-transition splitting at
    the applied field.  ``power_split`` is the fraction of ``u0_mw_cm2`` in
    the component addressing the lower ground manifold (the split is not a
    measured quantity; 1:1 is the default).
    """

    u0_mw_cm2: float = 0.5
    laser_detuning: float = 0.0       # [rad/s] from the F_e low component
    raman_detuning: float = 0.0       # [rad/s]
    sigma_minus_phase: float = 0.0    # [rad]
    power_split: float = 0.5

    def __post_init__(self):
        if self.u0_mw_cm2 < 0:
            raise ValueError("intensity must be nonnegative")
        if not 0.0 <= self.power_split <= 1.0:
            raise ValueError("power_split must lie in [0, 1]")


@dataclass(frozen=True)
class CptState:
    """Normalized two-component dark superposition of a lambda scheme."""

    g1: Level
    g2: Level
    e: Level
    c1: complex
    c2: complex


@dataclass(frozen=True)
class LambdaScheme:
    """Topology of the two-photon link between a pair of ground sublevels."""

    g1: Level
    g2: Level
    partners: tuple[Level, ...]   # excited states shared by both legs
    kind: str                     # lambda | double_lambda | w_type | none
    cpt_possible: bool


def intensity_to_amplitude(intensity_mw_cm2: float, c_light: float) -> float:
    """|E| [statvolt/cm] of a plane wave with the given intensity."""
    if intensity_mw_cm2 < 0:
        raise ValueError("intensity must be nonnegative")
    return math.sqrt(8.0 * math.pi * intensity_mw_cm2 * MW_CM2_TO_ERG / c_light)


def amplitude_to_intensity(amplitude: complex, c_light: float) -> float:
    """Intensity [mW/cm^2] carried by a complex field amplitude."""
    return c_light * abs(amplitude) ** 2 / (8.0 * math.pi) / MW_CM2_TO_ERG


def decompose_linear_polarization(
    intensity_mw_cm2: float,
    phase_minus: float = 0.0,
    c_light: float = 2.99792458e10,
) -> tuple[complex, complex]:
    """Sigma+/sigma- amplitudes of one linearly polarized frequency component.

    Both circular components carry half the intensity; ``phase_minus``
    advances the sigma- component.  |amp+|^2 + |amp-|^2 reproduces the full
    intensity exactly.
    """
    total = intensity_to_amplitude(intensity_mw_cm2, c_light)
    amp = total / math.sqrt(2.0)
    return complex(amp), amp * cmath.exp(1j * phase_minus)


def fields_from_drive(spec: AtomSpec, drive: DriveConfig,
                      h_gauss: float) -> tuple[FieldComponent, ...]:
    """The four drive channels (two frequencies x two polarizations).

    The sigma- differential phase sits on the upper-manifold frequency; the
    lower-manifold component is the phase reference.
    """
    f_low, f_high = spec.f_ground
    c_light = spec.constants.c
    i_low = drive.u0_mw_cm2 * drive.power_split
    i_high = drive.u0_mw_cm2 * (1.0 - drive.power_split)

    lp, lm = decompose_linear_polarization(i_low, 0.0, c_light)
    hp, hm = decompose_linear_polarization(i_high, drive.sigma_minus_phase,
                                           c_light)
    detuning_low = drive.laser_detuning
    # The modulation tracks the 0-0 splitting at the applied field, so the
    # upper component is shifted by the quadratic clock shift and delta_R.
    detuning_high = (drive.laser_detuning - drive.raman_detuning
                     - (clock_splitting(spec, h_gauss)
                        - spec.omega_hfs_ground))
    return (
        FieldComponent(f_low, detuning_low, +1, lp),
        FieldComponent(f_low, detuning_low, -1, lm),
        FieldComponent(f_high, detuning_high, +1, hp),
        FieldComponent(f_high, detuning_high, -1, hm),
    )


def cpt_state(g1: Level, g2: Level, e: Level,
              v1: complex, v2: complex) -> CptState:
    """Dark superposition (V2 |g1> - V1 |g2>) / sqrt(|V1|^2 + |V2|^2).

    ``v1`` and ``v2`` are the interaction elements <g1|V|e> and <g2|V|e>.
    """
    if g1.key == g2.key:
        raise ValueError("the two ground levels must differ")
    if g1.manifold != "ground" or g2.manifold != "ground":
        raise ValueError("g1 and g2 must be ground levels")
    norm = math.hypot(abs(v1), abs(v2))
    if norm == 0.0:
        raise ValueError("both couplings vanish; no lambda scheme")
    return CptState(g1, g2, e, v2 / norm, -v1 / norm)


def _target_f_excited(spec: AtomSpec, fields) -> HalfInt:
    """Excited manifold the drive is tuned to (smallest mean |detuning|)."""
    mean = sum(f.optical_detuning for f in fields) / len(fields)
    f_low, f_high = spec.f_excited
    if abs(mean) <= abs(mean - spec.omega_hfs_excited):
        return f_low
    return f_high


def _leg_couplings(spec: AtomSpec, fields, g: Level, f_e: HalfInt,
                   h_gauss: float) -> dict[tuple[str, int, int], complex]:
    """Nonzero interaction elements from one ground level, keyed by partner."""
    from .atom import excited_energy

    out: dict[tuple[str, int, int], complex] = {}
    for comp in fields:
        if comp.couples_f_g != g.f or comp.amplitude == 0:
            continue
        tm_e = g.m.twice + 2 * comp.q
        if abs(tm_e) > f_e.twice:
            continue
        m_e = HalfInt(tm_e)
        e = Level("excited", f_e, m_e,
                  excited_energy(spec, f_e, m_e, h_gauss), h_gauss)
        d = dipole_element(spec, g, e)
        if d == 0.0:
            continue
        out[e.key] = out.get(e.key, 0.0) + (-d * comp.amplitude)
    return out


def classify_scheme(spec: AtomSpec, fields, g1: Level,
                    g2: Level) -> LambdaScheme:
    """Classify the two-photon excitation topology of a ground-level pair.

    ``w_type`` means additional excited partners couple to a single leg and
    no superposition of g1, g2 is simultaneously dark for every coupled
    excited state; ``double_lambda`` is the equal-m pair closed through both
    circular polarizations, CPT-capable only under the loop phase condition.
    """
    from .atom import excited_energy

    if g1.manifold != "ground" or g2.manifold != "ground":
        raise ValueError("classify_scheme expects ground levels")
    f_e = _target_f_excited(spec, fields)
    h = g1.field_gauss
    v1 = _leg_couplings(spec, fields, g1, f_e, h)
    v2 = _leg_couplings(spec, fields, g2, f_e, h)
    shared = sorted(set(v1) & set(v2))
    if not shared:
        return LambdaScheme(g1, g2, (), "none", False)

    partners = tuple(
        Level("excited", HalfInt(tf), HalfInt(tm),
              excited_energy(spec, HalfInt(tf), HalfInt(tm), h), h)
        for (_, tf, tm) in shared
    )
    all_keys = sorted(set(v1) | set(v2))
    # A dark combination of (g1, g2) exists iff the 2 x N coupling matrix has
    # rank one: every 2 x 2 minor vanishes.
    scale = max(max(abs(v) for v in v1.values()),
                max(abs(v) for v in v2.values()))
    rank_one = True
    for a in range(len(all_keys)):
        for b in range(a + 1, len(all_keys)):
            ka, kb = all_keys[a], all_keys[b]
            minor = (v1.get(ka, 0.0) * v2.get(kb, 0.0)
                     - v1.get(kb, 0.0) * v2.get(ka, 0.0))
            if abs(minor) > 1e-12 * scale * scale:
                rank_one = False
                break
        if not rank_one:
            break

    if g1.m == g2.m and len(shared) >= 2:
        kind = "double_lambda"
    elif len(all_keys) > len(shared) and not rank_one:
        kind = "w_type"
    else:
        kind = "lambda"
    return LambdaScheme(g1, g2, partners, kind, rank_one)
