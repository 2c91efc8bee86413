"""Rb-87 D1 level structure, Zeeman energies and dipole couplings.

Ground-state energies come from the exact Breit-Rabi closed form for J = 1/2
(including the nuclear term), excited-state energies from the linear g_F
approximation; both are referenced to their manifold centroid.  All dipole
matrix elements are built from the Wigner-Eckart reduction

    <F_g m_g| d_q |F_e m_e> = (-1)^(F_g + J_e + I - 1) sqrt(2 F_g + 1)
        * <F_g m_g; 1 q | F_e m_e> * {J_g I F_g; F_e 1 J_e} * <J_g||d||J_e>

with Condon-Shortley phases throughout.  Everything is expressed in Gaussian
units; energies and rates are angular frequencies in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .angular import HalfInt, clebsch_gordan, wigner_6j

__all__ = [
    "PhysicalConstants",
    "AtomSpec",
    "Level",
    "LoopAbsentError",
    "build_levels",
    "ground_energy",
    "excited_energy",
    "clock_splitting",
    "pair_splitting",
    "pair_splitting_exact",
    "dipole_element",
    "ratio_zeta",
    "rb87_d1",
]

TWO_PI = 2.0 * math.pi

# Largest |H| for which the ground-state treatment is kept; well below the
# intermediate-field regime where the excited linear-Zeeman model degrades.
MAX_FIELD_GAUSS = 100.0


class LoopAbsentError(ValueError):
    """The requested double-lambda loop does not exist for this (m, F_e)."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values in Gaussian units (erg, G, s, cm)."""

    mu_b: float = 9.2740100783e-21   # Bohr magneton [erg/G]
    mu_n: float = 5.0507837461e-24   # nuclear magneton [erg/G]
    hbar: float = 1.054571817e-27    # [erg s]
    c: float = 2.99792458e10         # [cm/s]

    def __post_init__(self):
        if min(self.mu_b, self.mu_n, self.hbar, self.c) <= 0:
            raise ValueError("physical constants must be positive")
        ratio = self.mu_b / self.mu_n
        if abs(ratio / 1836.153 - 1.0) > 1e-3:
            raise ValueError(
                f"mu_b/mu_n = {ratio:.2f} inconsistent with the "
                "proton-to-electron mass ratio"
            )


@dataclass(frozen=True)
class AtomSpec:
    """Alkali D1 atom parameters.  Defaults are Rb-87 data-sheet values.

    ``g_i`` is the nuclear moment in nuclear magnetons (mu / mu_N); the
    nuclear Zeeman energy of a sublevel is -g_i * mu_N * m * H.
    ``reduced_dipole`` defaults to the value that reproduces ``gamma_e``
    through the spontaneous-decay sum rule, which keeps absorption strengths
    and decay branching mutually consistent.
    """

    nuclear_spin: HalfInt = HalfInt(3)       # I = 3/2
    j_ground: HalfInt = HalfInt(1)           # J = 1/2
    j_excited: HalfInt = HalfInt(1)          # J' = 1/2
    omega_hfs_ground: float = TWO_PI * 6.834682610904e9   # [rad/s]
    omega_hfs_excited: float = TWO_PI * 816.7e6           # [rad/s]
    g_i: float = 2.7512
    g_j_ground: float = 2.00233
    g_j_excited: float = 0.666
    gamma_e: float = TWO_PI * 5.75e6                      # [rad/s]
    optical_linewidth: float = TWO_PI * 350e6             # [rad/s]
    omega_0: float = TWO_PI * 3.77107463e14               # D1 [rad/s]
    reduced_dipole: float | None = None                   # [statC cm]
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        for name in ("omega_hfs_ground", "omega_hfs_excited", "gamma_e",
                     "optical_linewidth", "omega_0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.reduced_dipole is None:
            object.__setattr__(self, "reduced_dipole", self._derived_dipole())
        if self.reduced_dipole <= 0:
            raise ValueError("reduced_dipole must be positive")

    def _derived_dipole(self) -> float:
        # gamma_e = (4 w0^3 / 3 hbar c^3) |<J||d||J'>|^2 / (2 J' + 1)
        k = self.constants
        tje = self.j_excited.twice
        return math.sqrt(
            3.0 * self.gamma_e * k.hbar * k.c**3 * (tje + 1)
            / (4.0 * self.omega_0**3)
        )

    @property
    def f_ground(self) -> tuple[HalfInt, HalfInt]:
        """(F_low, F_high) of the ground manifold."""
        return (self.nuclear_spin - self.j_ground,
                self.nuclear_spin + self.j_ground)

    @property
    def f_excited(self) -> tuple[HalfInt, HalfInt]:
        return (self.nuclear_spin - self.j_excited,
                self.nuclear_spin + self.j_excited)


@dataclass(frozen=True)
class Level:
    """One hyperfine-Zeeman sublevel with its energy at a fixed field.

    ``energy`` is in rad/s relative to the manifold centroid at
    ``field_gauss``.
    """

    manifold: str            # "ground" | "excited"
    f: HalfInt
    m: HalfInt
    energy: float
    field_gauss: float

    def __post_init__(self):
        if self.manifold not in ("ground", "excited"):
            raise ValueError(f"unknown manifold {self.manifold!r}")
        if abs(self.m).twice > self.f.twice:
            raise ValueError(f"|m| > F for ({self.f}, {self.m})")

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.manifold, self.f.twice, self.m.twice)


def rb87_d1() -> AtomSpec:
    """The default Rb-87 D1 atom."""
    return AtomSpec()


def _check_field(h_gauss: float) -> None:
    if abs(h_gauss) > MAX_FIELD_GAUSS:
        raise ValueError(
            f"|H| = {abs(h_gauss)} G outside the supported range "
            f"(<= {MAX_FIELD_GAUSS} G)"
        )


def ground_energy(spec: AtomSpec, f, m, h_gauss: float) -> float:
    """Breit-Rabi ground-state energy [rad/s] relative to the hf centroid."""
    _check_field(h_gauss)
    f = HalfInt.of(f)
    m = HalfInt.of(m)
    f_low, f_high = spec.f_ground
    if f not in (f_low, f_high):
        raise ValueError(f"F = {f} not in the ground manifold")
    k = spec.constants
    i2 = spec.nuclear_spin.twice
    w = spec.omega_hfs_ground
    mf = float(m)
    x = (spec.g_j_ground * k.mu_b + spec.g_i * k.mu_n) * h_gauss / (k.hbar * w)
    base = -w / (2.0 * (i2 + 1)) - spec.g_i * k.mu_n * mf * h_gauss / k.hbar
    radicand = 1.0 + 4.0 * mf * x / (i2 + 1) + x * x
    sign = 1.0 if f == f_high else -1.0
    return base + sign * 0.5 * w * math.sqrt(radicand)


def excited_energy(spec: AtomSpec, f, m, h_gauss: float) -> float:
    """Excited-state energy [rad/s]: hf offset plus linear Zeeman g_F term."""
    _check_field(h_gauss)
    f = HalfInt.of(f)
    m = HalfInt.of(m)
    f_low, f_high = spec.f_excited
    if f not in (f_low, f_high):
        raise ValueError(f"F = {f} not in the excited manifold")
    k = spec.constants
    n_low = f_low.twice + 1
    n_high = f_high.twice + 1
    if f == f_low:
        offset = -spec.omega_hfs_excited * n_high / (n_low + n_high)
    else:
        offset = spec.omega_hfs_excited * n_low / (n_low + n_high)
    ff = float(f)
    jj = float(spec.j_excited)
    ii = float(spec.nuclear_spin)
    g_f = spec.g_j_excited * (
        (ff * (ff + 1) + jj * (jj + 1) - ii * (ii + 1))
        / (2.0 * ff * (ff + 1))
    )
    return offset + g_f * k.mu_b * float(m) * h_gauss / k.hbar


def build_levels(spec: AtomSpec, h_gauss: float) -> list[Level]:
    """All D1 sublevels in deterministic order.

    Ground manifold first (F ascending, m ascending), then excited.  For
    Rb-87 this yields 8 ground and 8 excited levels.
    """
    _check_field(h_gauss)
    levels: list[Level] = []
    for f in spec.f_ground:
        for tm in range(-f.twice, f.twice + 1, 2):
            m = HalfInt(tm)
            levels.append(Level("ground", f, m,
                                ground_energy(spec, f, m, h_gauss), h_gauss))
    for f in spec.f_excited:
        for tm in range(-f.twice, f.twice + 1, 2):
            m = HalfInt(tm)
            levels.append(Level("excited", f, m,
                                excited_energy(spec, f, m, h_gauss), h_gauss))
    return levels


def clock_splitting(spec: AtomSpec, h_gauss: float) -> float:
    """0-0 working-transition splitting E(F_high,0) - E(F_low,0) [rad/s]."""
    f_low, f_high = spec.f_ground
    return (ground_energy(spec, f_high, 0, h_gauss)
            - ground_energy(spec, f_low, 0, h_gauss))


def pair_splitting(spec: AtomSpec, h_gauss: float, scheme: str) -> float:
    """Weak-field splitting of the |Delta m| = 2 side pairs [rad/s].

    Scheme "a" is the {|1,+1>, |2,-1>} pair (+ linear nuclear term),
    scheme "b" the {|1,-1>, |2,+1>} pair (- sign); both share the
    second-order electron-Zeeman term.
    """
    if scheme not in ("a", "b"):
        raise ValueError(f"scheme must be 'a' or 'b', got {scheme!r}")
    k = spec.constants
    w = spec.omega_hfs_ground
    linear = 2.0 * spec.g_i * k.mu_n * h_gauss / k.hbar
    quadratic = (3.0 * spec.g_j_ground**2 * k.mu_b**2
                 / (8.0 * w * k.hbar**2)) * h_gauss**2
    return w + (linear if scheme == "a" else -linear) + quadratic


def pair_splitting_exact(spec: AtomSpec, h_gauss: float, scheme: str) -> float:
    """Side-pair splitting from the Breit-Rabi energies [rad/s]."""
    if scheme not in ("a", "b"):
        raise ValueError(f"scheme must be 'a' or 'b', got {scheme!r}")
    f_low, f_high = spec.f_ground
    s = 1 if scheme == "a" else -1
    return (ground_energy(spec, f_high, -s, h_gauss)
            - ground_energy(spec, f_low, s, h_gauss))


@lru_cache(maxsize=4096)
def _dipole_cached(spec: AtomSpec, tf_g: int, tm_g: int,
                   tf_e: int, tm_e: int) -> float:
    tq = tm_e - tm_g
    if abs(tq) > 2 or abs(tf_e - tf_g) > 2:
        return 0.0
    f_g, m_g = HalfInt(tf_g), HalfInt(tm_g)
    f_e, m_e = HalfInt(tf_e), HalfInt(tm_e)
    cg = clebsch_gordan(f_g, m_g, 1, HalfInt(tq), f_e, m_e)
    if cg == 0.0:
        return 0.0
    sixj = wigner_6j(spec.j_ground, spec.nuclear_spin, f_g,
                     f_e, 1, spec.j_excited)
    if sixj == 0.0:
        return 0.0
    phase_twice = tf_g + spec.j_excited.twice + spec.nuclear_spin.twice - 2
    sign = -1.0 if (phase_twice // 2) % 2 else 1.0
    return (sign * math.sqrt(tf_g + 1.0) * cg * sixj * spec.reduced_dipole)


def dipole_element(spec: AtomSpec, g: Level, e: Level, q=None) -> float:
    """<g| d_q |e> for a ground and an excited level [statC cm].

    Returns 0.0 if q does not match m_e - m_g or the hyperfine selection
    rule |F_e - F_g| <= 1 fails.
    """
    if g.manifold != "ground" or e.manifold != "excited":
        raise ValueError("dipole_element expects (ground, excited) levels")
    if q is not None and HalfInt.of(q).twice != e.m.twice - g.m.twice:
        return 0.0
    return _dipole_cached(spec, g.f.twice, g.m.twice, e.f.twice, e.m.twice)


def _bare(manifold: str, f: HalfInt, tm: int) -> Level:
    return Level(manifold, f, HalfInt(tm), 0.0, 0.0)


def ratio_zeta(spec: AtomSpec, m, f_e,
               amp_low_plus: complex, amp_high_plus: complex,
               amp_low_minus: complex, amp_high_minus: complex) -> complex:
    """Closed-loop coupling ratio of the double-lambda scheme at projection m.

    With interaction elements V = -<g|d_q|e> E the returned value is

        zeta = [V(F_high -> e_+)/V(F_low -> e_+)]
             / [V(F_high -> e_-)/V(F_low -> e_-)]

    where e_+- are the |F_e, m +- 1> partners.  ``amp_*_plus/minus`` are the
    complex sigma+/sigma- field amplitudes addressing the lower and upper
    ground manifolds.  zeta = +1 permits CPT in the closed loop; plain
    linearly polarized bichromatic light gives exactly -1 on the m = 0 loop.
    """
    m = HalfInt.of(m)
    f_e = HalfInt.of(f_e)
    if f_e not in spec.f_excited:
        raise LoopAbsentError(f"F_e = {f_e} not in the excited manifold")
    f_low, f_high = spec.f_ground
    if abs(m).twice > f_low.twice:
        raise LoopAbsentError(f"|m| = {abs(m)} exceeds F = {f_low}")
    for tm_e in (m.twice + 2, m.twice - 2):
        if abs(tm_e) > f_e.twice:
            raise LoopAbsentError(
                f"no |F_e = {f_e}, m = {HalfInt(tm_e)}> state; loop absent"
            )
    e_plus = _bare("excited", f_e, m.twice + 2)
    e_minus = _bare("excited", f_e, m.twice - 2)
    g_low = _bare("ground", f_low, m.twice)
    g_high = _bare("ground", f_high, m.twice)

    couplings = {
        ("low", +1): -dipole_element(spec, g_low, e_plus) * amp_low_plus,
        ("high", +1): -dipole_element(spec, g_high, e_plus) * amp_high_plus,
        ("low", -1): -dipole_element(spec, g_low, e_minus) * amp_low_minus,
        ("high", -1): -dipole_element(spec, g_high, e_minus) * amp_high_minus,
    }
    for (leg, pol), v in couplings.items():
        if v == 0:
            raise LoopAbsentError(
                f"coupling of the {leg}-F leg to the sigma{pol:+d} partner "
                "vanishes; the double-lambda loop does not close"
            )
    return ((couplings[("high", +1)] / couplings[("low", +1)])
            / (couplings[("high", -1)] / couplings[("low", -1)]))
