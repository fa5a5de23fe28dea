"""
Contrat d'un problème FBSDE scalaire.

Un FbsdeProblem regroupe les coefficients μ, σ, f, g, le niveau de dérivées
partielles disponibles (DerivativeTier) et, optionnellement, les champs de
découplage analytiques (u, v).

Les problèmes livrés sont construits par build_problem() à partir
d'expressions sympy : toutes les dérivées partielles exigées par le niveau
sont dérivées symboliquement puis compilées en fonctions numpy.

Composition (compose):
    Pour un champ de découplage (φ, ζ), f̄(t, x) = f(t, x, φ(x), ζ(x)) et
    ses dérivées totales en x par la règle de chaîne (ordre 1 et 2).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Dict, Mapping, Optional, Protocol, Tuple, Union

import numpy as np
import sympy as sp

from ..errors import InvalidParamsError, TierUnavailableError

ArrayLike = Union[float, np.ndarray]
Coefficient = Callable[[ArrayLike, ArrayLike, ArrayLike, ArrayLike], ArrayLike]

T_SYM, X_SYM, Y_SYM, Z_SYM = sp.symbols("t x y z", real=True)
STATE_SYMBOLS = (T_SYM, X_SYM, Y_SYM, Z_SYM)


class DerivativeTier(IntEnum):
    """Niveau de dérivées partielles fournies par un problème"""

    NONE = 0
    FIRST = 1
    SECOND = 2


FIRST_ORDER_PARTIALS: Tuple[str, ...] = ("sigma_x", "sigma_y", "sigma_z")

SECOND_ORDER_PARTIALS: Tuple[str, ...] = (
    "mu_t",
    "mu_x",
    "mu_y",
    "mu_z",
    "sigma_t",
    "mu_xx",
    "mu_xy",
    "mu_xz",
    "mu_yy",
    "mu_yz",
    "mu_zz",
    "sigma_xx",
    "sigma_xy",
    "sigma_xz",
    "sigma_yy",
    "sigma_yz",
    "sigma_zz",
)


def required_partials(tier: DerivativeTier) -> Tuple[str, ...]:
    """Noms des dérivées partielles exigées par un niveau"""
    if tier >= DerivativeTier.SECOND:
        return FIRST_ORDER_PARTIALS + SECOND_ORDER_PARTIALS
    if tier >= DerivativeTier.FIRST:
        return FIRST_ORDER_PARTIALS
    return ()


# ==================== COMPILATION SYMPY ====================


def compile_expression(expr: sp.Expr, symbols=STATE_SYMBOLS) -> Callable[..., ArrayLike]:
    """
    Compile une expression sympy en fonction numpy vectorisée.

    Le résultat est toujours diffusé à la forme commune des arguments
    (une constante renvoie un tableau plein, pas un scalaire).
    """
    fn = sp.lambdify(symbols, expr, modules="numpy")

    def evaluate(*args):
        values = [np.asarray(arg, dtype=float) for arg in args]
        out = np.zeros(np.broadcast(*values).shape) + fn(*values)
        return out if out.ndim else float(out)

    return evaluate


def _state_partials(expr: sp.Expr, prefix: str, tier: DerivativeTier) -> Dict[str, sp.Expr]:
    variables = {"t": T_SYM, "x": X_SYM, "y": Y_SYM, "z": Z_SYM}
    result = {}
    for name in required_partials(tier):
        head, _, wrt = name.partition("_")
        if head != prefix:
            continue
        derivative = expr
        for letter in wrt:
            derivative = sp.diff(derivative, variables[letter])
        result[name] = derivative
    return result


# ==================== CHAMPS DE DÉCOUPLAGE ====================


@dataclass(frozen=True)
class FieldJet:
    """
    Valeurs d'un couple (φ, ζ) et de ses dérivées en x.

    Les dérivées au-delà de l'ordre demandé valent None.
    """

    phi: np.ndarray
    zeta: np.ndarray
    dphi: Optional[np.ndarray] = None
    dzeta: Optional[np.ndarray] = None
    ddphi: Optional[np.ndarray] = None
    ddzeta: Optional[np.ndarray] = None


class FieldLike(Protocol):
    """Tout objet capable de fournir un FieldJet en des points x"""

    def jet(self, x: ArrayLike, counter=None, order: int = 2) -> FieldJet:
        ...


class AnalyticFields(ABC):
    """Champs de découplage (u, v) connus en forme fermée"""

    @abstractmethod
    def u(self, t: float, x: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def v(self, t: float, x: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def jet(self, t: float, x: ArrayLike, order: int = 2) -> FieldJet:
        ...

    def at(self, t: float) -> "AnalyticSlice":
        """Tranche à temps fixé, utilisable comme FieldLike"""
        return AnalyticSlice(fields=self, t=t)


@dataclass(frozen=True)
class AnalyticSlice:
    fields: AnalyticFields
    t: float

    def jet(self, x: ArrayLike, counter=None, order: int = 2) -> FieldJet:
        return self.fields.jet(self.t, x, order=order)


class SymbolicFields(AnalyticFields):
    """
    Champs analytiques donnés par des expressions sympy en (t, x).

    Les dérivées en x jusqu'à l'ordre 2 sont dérivées symboliquement.
    """

    def __init__(self, u_expr: sp.Expr, v_expr: sp.Expr):
        args = (T_SYM, X_SYM)
        self.u_expr = u_expr
        self.v_expr = v_expr
        self._u = compile_expression(u_expr, args)
        self._v = compile_expression(v_expr, args)
        self._u_x = compile_expression(sp.diff(u_expr, X_SYM), args)
        self._v_x = compile_expression(sp.diff(v_expr, X_SYM), args)
        self._u_xx = compile_expression(sp.diff(u_expr, X_SYM, 2), args)
        self._v_xx = compile_expression(sp.diff(v_expr, X_SYM, 2), args)

    def u(self, t, x):
        return self._u(t, x)

    def v(self, t, x):
        return self._v(t, x)

    def jet(self, t, x, order: int = 2) -> FieldJet:
        x = np.asarray(x, dtype=float)
        return FieldJet(
            phi=self._u(t, x),
            zeta=self._v(t, x),
            dphi=self._u_x(t, x) if order >= 1 else None,
            dzeta=self._v_x(t, x) if order >= 1 else None,
            ddphi=self._u_xx(t, x) if order >= 2 else None,
            ddzeta=self._v_xx(t, x) if order >= 2 else None,
        )


# ==================== PROBLÈME ====================


@dataclass(frozen=True)
class FbsdeProblem:
    """
    Problème FBSDE scalaire entièrement couplé.

    Attributes:
        name: Nom du problème (ex: "example3")
        T: Horizon (> 0)
        x0: État initial déterministe
        mu, sigma, driver: Coefficients (t, x, y, z) -> réel, vectorisés
        terminal, terminal_deriv: g(x) et g'(x)
        tier: Niveau de dérivées partielles disponibles
        sigma_depends_on_z: True si σ dépend de z
        partials: Dérivées partielles nommées ("sigma_x", "mu_xz", ...)
        analytic_fields: Champs (u, v) analytiques (optionnel)
        parameters: Paramètres numériques du problème (pour les rapports)
    """

    name: str
    T: float
    x0: float
    mu: Coefficient
    sigma: Coefficient
    driver: Coefficient
    terminal: Callable[[ArrayLike], ArrayLike]
    terminal_deriv: Callable[[ArrayLike], ArrayLike]
    tier: DerivativeTier = DerivativeTier.NONE
    sigma_depends_on_z: bool = False
    partials: Mapping[str, Coefficient] = field(default_factory=dict)
    analytic_fields: Optional[AnalyticFields] = None
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidParamsError(f"Horizon T doit être > 0, reçu: {self.T}")
        missing = [n for n in required_partials(self.tier) if n not in self.partials]
        if missing:
            raise TierUnavailableError(
                f"Problème '{self.name}' déclaré {self.tier.name} sans {missing}"
            )

    def require_tier(self, tier: DerivativeTier):
        """Vérifie que le problème fournit les dérivées d'un niveau"""
        if self.tier < tier:
            raise TierUnavailableError(
                f"Problème '{self.name}' de niveau {self.tier.name}, "
                f"{DerivativeTier(tier).name} requis"
            )

    def partial(self, name: str) -> Coefficient:
        if name not in self.partials:
            raise TierUnavailableError(
                f"Dérivée '{name}' indisponible pour '{self.name}'"
            )
        return self.partials[name]

    @property
    def analytic_u(self) -> Optional[Callable[[float, ArrayLike], ArrayLike]]:
        return self.analytic_fields.u if self.analytic_fields else None

    @property
    def analytic_v(self) -> Optional[Callable[[float, ArrayLike], ArrayLike]]:
        return self.analytic_fields.v if self.analytic_fields else None


def build_problem(
    name: str,
    T: float,
    x0: float,
    mu: sp.Expr,
    sigma: sp.Expr,
    driver: sp.Expr,
    terminal: sp.Expr,
    tier: DerivativeTier = DerivativeTier.SECOND,
    analytic_fields: Optional[AnalyticFields] = None,
    parameters: Optional[Mapping[str, float]] = None,
) -> FbsdeProblem:
    """
    Construit un FbsdeProblem à partir d'expressions sympy.

    Args:
        mu, sigma, driver: Expressions en (t, x, y, z) (symboles de STATE_SYMBOLS)
        terminal: Expression en x
        tier: Niveau de dérivées à générer

    Exemple:
        >>> t, x, y, z = STATE_SYMBOLS
        >>> problem = build_problem("bm", 1.0, 0.0, sp.Integer(0), sp.Integer(1),
        ...                         sp.Integer(0), sp.sin(x))
    """
    mu, sigma, driver, terminal = (
        sp.sympify(e) for e in (mu, sigma, driver, terminal)
    )
    symbolic_partials = {
        **_state_partials(mu, "mu", tier),
        **_state_partials(sigma, "sigma", tier),
    }
    return FbsdeProblem(
        name=name,
        T=float(T),
        x0=float(x0),
        mu=compile_expression(mu),
        sigma=compile_expression(sigma),
        driver=compile_expression(driver),
        terminal=compile_expression(terminal, (X_SYM,)),
        terminal_deriv=compile_expression(sp.diff(terminal, X_SYM), (X_SYM,)),
        tier=tier,
        sigma_depends_on_z=sigma.has(Z_SYM),
        partials={k: compile_expression(v) for k, v in symbolic_partials.items()},
        analytic_fields=analytic_fields,
        parameters=dict(parameters or {}),
    )


# ==================== COMPOSITION ====================


@dataclass(frozen=True)
class ComposedCoefficients:
    """
    Coefficients composés avec un champ de découplage, évalués en des points x.

    Les champs au-delà du niveau demandé valent None.
    """

    tier: DerivativeTier
    mu_bar: np.ndarray
    sigma_bar: np.ndarray
    dx_sigma_bar: Optional[np.ndarray] = None
    dt_mu_bar: Optional[np.ndarray] = None
    dx_mu_bar: Optional[np.ndarray] = None
    dxx_mu_bar: Optional[np.ndarray] = None
    dt_sigma_bar: Optional[np.ndarray] = None
    dxx_sigma_bar: Optional[np.ndarray] = None


def _total_dx(problem: FbsdeProblem, prefix: str, args, jet: FieldJet) -> np.ndarray:
    p = lambda suffix: problem.partial(f"{prefix}_{suffix}")(*args)  # noqa: E731
    return p("x") + p("y") * jet.dphi + p("z") * jet.dzeta


def _total_dxx(problem: FbsdeProblem, prefix: str, args, jet: FieldJet) -> np.ndarray:
    p = lambda suffix: problem.partial(f"{prefix}_{suffix}")(*args)  # noqa: E731
    dphi, dzeta = jet.dphi, jet.dzeta
    return (
        p("xx")
        + 2.0 * p("xy") * dphi
        + 2.0 * p("xz") * dzeta
        + p("yy") * dphi**2
        + 2.0 * p("yz") * dphi * dzeta
        + p("zz") * dzeta**2
        + p("y") * jet.ddphi
        + p("z") * jet.ddzeta
    )


def compose_jet(
    problem: FbsdeProblem, jet: FieldJet, t: float, x: ArrayLike, tier: DerivativeTier
) -> ComposedCoefficients:
    """compose() à partir d'un FieldJet déjà évalué en x"""
    problem.require_tier(tier)
    x = np.asarray(x, dtype=float)
    args = (t, x, jet.phi, jet.zeta)

    mu_bar = problem.mu(*args)
    sigma_bar = problem.sigma(*args)
    if tier == DerivativeTier.NONE:
        return ComposedCoefficients(tier=tier, mu_bar=mu_bar, sigma_bar=sigma_bar)

    dx_sigma_bar = _total_dx(problem, "sigma", args, jet)
    if tier == DerivativeTier.FIRST:
        return ComposedCoefficients(
            tier=tier, mu_bar=mu_bar, sigma_bar=sigma_bar, dx_sigma_bar=dx_sigma_bar
        )

    # le champ est figé sur le pas : la dérivée totale en t se réduit à ∂t
    return ComposedCoefficients(
        tier=tier,
        mu_bar=mu_bar,
        sigma_bar=sigma_bar,
        dx_sigma_bar=dx_sigma_bar,
        dt_mu_bar=problem.partial("mu_t")(*args),
        dx_mu_bar=_total_dx(problem, "mu", args, jet),
        dxx_mu_bar=_total_dxx(problem, "mu", args, jet),
        dt_sigma_bar=problem.partial("sigma_t")(*args),
        dxx_sigma_bar=_total_dxx(problem, "sigma", args, jet),
    )


def compose(
    problem: FbsdeProblem,
    field: FieldLike,
    t: float,
    x: ArrayLike,
    tier: DerivativeTier,
    counter=None,
) -> ComposedCoefficients:
    """
    Compose μ et σ avec un champ de découplage (φ, ζ) au temps t.

    Raises:
        TierUnavailableError: si le problème ne fournit pas le niveau demandé
    """
    problem.require_tier(tier)
    jet = field.jet(x, counter=counter, order=int(tier))
    return compose_jet(problem, jet, t, x, tier)
