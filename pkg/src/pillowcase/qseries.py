"""
Series formales truncadas en q^{1/2} con coeficientes racionales exactos.

Los exponentes se guardan como numeradores enteros sobre denominador 2:
la clave n representa q^{n/2}. Cada serie conoce su corte (`cutoff2`,
también en medios) y ninguna operación lee más allá de él.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

from sympy import bernoulli, divisor_sigma

from .errors import SeriesError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

SUPPORTED_SCALES = (Fraction(1, 2), Fraction(1), Fraction(2))


class QSeries:
    """Serie Σ c_n q^{n/2} conocida exactamente hasta q^{cutoff2/2}."""

    __slots__ = ("_coeffs", "cutoff2")

    def __init__(self, coeffs: Optional[Mapping[int, Number]] = None, cutoff2: int = 0):
        if cutoff2 < 0:
            raise SeriesError(f"Corte vacío: cutoff2 = {cutoff2}")
        clean: Dict[int, Fraction] = {}
        for n, c in (coeffs or {}).items():
            n = int(n)
            if n < 0:
                raise SeriesError(f"Exponente negativo q^{n}/2 no soportado")
            if n > cutoff2:
                continue
            value = Fraction(c)
            if value:
                clean[n] = value
        self._coeffs = clean
        self.cutoff2 = int(cutoff2)

    # -- constructores -------------------------------------------------

    @classmethod
    def zero(cls, cutoff: int) -> "QSeries":
        return cls({}, 2 * cutoff)

    @classmethod
    def constant(cls, value: Number, cutoff: int) -> "QSeries":
        return cls({0: value}, 2 * cutoff)

    @classmethod
    def one(cls, cutoff: int) -> "QSeries":
        return cls.constant(1, cutoff)

    @classmethod
    def from_q_coefficients(cls, values: Union[Mapping[int, Number], Iterable[Number]],
                            cutoff: Optional[int] = None) -> "QSeries":
        """
        Serie en potencias enteras de q.

        Args:
            values: Lista [c_0, c_1, ...] o diccionario {d: c_d}
            cutoff: Último exponente conocido (por defecto el último dado)
        """
        if isinstance(values, Mapping):
            items = {int(d): v for d, v in values.items()}
        else:
            items = dict(enumerate(values))
        if cutoff is None:
            cutoff = max(items) if items else 0
        return cls({2 * d: v for d, v in items.items()}, 2 * cutoff)

    # -- acceso --------------------------------------------------------

    @property
    def cutoff(self) -> Fraction:
        """Corte en unidades de q."""
        return Fraction(self.cutoff2, 2)

    def __getitem__(self, n: int) -> Fraction:
        """Coeficiente de q^{n/2}."""
        if n < 0:
            return Fraction(0)
        if n > self.cutoff2:
            raise SeriesError(f"Coeficiente q^{n}/2 fuera del corte {self.cutoff2}/2")
        return self._coeffs.get(n, Fraction(0))

    def coefficient(self, exponent: Number) -> Fraction:
        """Coeficiente de q^{exponent} con exponente entero o semientero."""
        doubled = Fraction(exponent) * 2
        if doubled.denominator != 1:
            raise SeriesError(f"Exponente {exponent} no es semientero")
        return self[int(doubled)]

    def q_coefficients(self) -> List[Fraction]:
        """Coeficientes de q^0, q^1, ... hasta el corte entero."""
        return [self[2 * d] for d in range(self.cutoff2 // 2 + 1)]

    def half_coefficients(self) -> List[Fraction]:
        return [self[n] for n in range(self.cutoff2 + 1)]

    def items(self):
        return sorted(self._coeffs.items())

    def is_integral_power(self) -> bool:
        """Verdadero si no aparecen potencias semienteras."""
        return all(n % 2 == 0 for n in self._coeffs)

    def valuation(self) -> Optional[int]:
        return min(self._coeffs) if self._coeffs else None

    def is_zero(self) -> bool:
        return not self._coeffs

    # -- aritmética ----------------------------------------------------

    def _coerce(self, other: Any) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries({0: other}, self.cutoff2)
        return NotImplemented

    def __add__(self, other: Any) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        cutoff2 = min(self.cutoff2, other.cutoff2)
        result = dict(self._coeffs)
        for n, c in other._coeffs.items():
            result[n] = result.get(n, 0) + c
        return QSeries(result, cutoff2)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries({n: -c for n, c in self._coeffs.items()}, self.cutoff2)

    def __sub__(self, other: Any) -> "QSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "QSeries":
        return (-self) + other

    def scalar_mul(self, value: Number) -> "QSeries":
        value = Fraction(value)
        return QSeries({n: value * c for n, c in self._coeffs.items()}, self.cutoff2)

    def __mul__(self, other: Any) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        cutoff2 = min(self.cutoff2, other.cutoff2)
        result: Dict[int, Fraction] = {}
        right = other._coeffs
        for a, ca in self._coeffs.items():
            if a > cutoff2:
                continue
            for b, cb in right.items():
                e = a + b
                if e <= cutoff2:
                    result[e] = result.get(e, 0) + ca * cb
        return QSeries(result, cutoff2)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QSeries":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QSeries({0: 1}, self.cutoff2)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def d_q(self) -> "QSeries":
        """D_q = q d/dq: multiplica el coeficiente de q^e por e."""
        return QSeries({n: c * Fraction(n, 2) for n, c in self._coeffs.items()}, self.cutoff2)

    def inverse(self) -> "QSeries":
        """Inversa multiplicativa; requiere término constante no nulo."""
        c0 = self._coeffs.get(0)
        if not c0:
            raise SeriesError("Serie sin término constante: no es invertible")
        inv: Dict[int, Fraction] = {0: 1 / c0}
        for n in range(1, self.cutoff2 + 1):
            acc = Fraction(0)
            for k, c in self._coeffs.items():
                if 0 < k <= n:
                    acc += c * inv.get(n - k, 0)
            if acc:
                inv[n] = -acc / c0
        return QSeries(inv, self.cutoff2)

    def __truediv__(self, other: Any) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(1 / Fraction(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def log(self) -> "QSeries":
        """
        Logaritmo de una serie con término constante 1.

        Raises:
            SeriesError: Si el término constante no es 1
        """
        if self._coeffs.get(0) != 1:
            raise SeriesError("log requiere término constante 1")
        derivative = self.d_q() / self
        return QSeries(
            {n: c / Fraction(n, 2) for n, c in derivative._coeffs.items() if n > 0},
            self.cutoff2,
        )

    def exp(self) -> "QSeries":
        """Exponencial de una serie sin término constante."""
        if self._coeffs.get(0):
            raise SeriesError("exp requiere término constante nulo")
        result: Dict[int, Fraction] = {0: Fraction(1)}
        for n in range(1, self.cutoff2 + 1):
            acc = Fraction(0)
            for k, c in self._coeffs.items():
                if k <= n:
                    acc += k * c * result.get(n - k, 0)
            if acc:
                result[n] = acc / n
        return QSeries(result, self.cutoff2)

    def substitute(self, scale: Number) -> "QSeries":
        """
        Sustitución q → q^scale.

        Raises:
            SeriesError: Si algún exponente deja de ser semientero
        """
        scale = Fraction(scale)
        if scale <= 0:
            raise SeriesError(f"Escala no positiva: {scale}")
        result = {}
        for n, c in self._coeffs.items():
            e = n * scale
            if e.denominator != 1:
                raise SeriesError(f"q^{n}/2 → exponente no semientero con escala {scale}")
            result[int(e)] = c
        cutoff2 = self.cutoff2 * scale
        return QSeries(result, int(cutoff2))

    def truncate(self, cutoff2: int) -> "QSeries":
        if cutoff2 > self.cutoff2:
            raise SeriesError(f"No se puede ampliar el corte {self.cutoff2} a {cutoff2}")
        return QSeries(self._coeffs, cutoff2)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        cutoff2 = min(self.cutoff2, other.cutoff2)
        return self.truncate(cutoff2)._coeffs == other.truncate(cutoff2)._coeffs

    def __hash__(self):
        return hash((self.cutoff2, tuple(self.items())))

    def is_proportional_to(self, other: "QSeries") -> Optional[Fraction]:
        """Devuelve c con self = c·other en la ventana común, o None."""
        cutoff2 = min(self.cutoff2, other.cutoff2)
        a, b = self.truncate(cutoff2), other.truncate(cutoff2)
        if b.is_zero():
            return Fraction(0) if a.is_zero() else None
        n0 = min(b._coeffs)
        ratio = a[n0] / b[n0]
        return ratio if a == b.scalar_mul(ratio) else None

    # -- serialización -------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        return {
            "den": 2,
            "cutoff": self.cutoff2,
            "coeffs": [[n, str(c)] for n, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "QSeries":
        try:
            den = int(data.get("den", 2))
            pairs = [(int(n), Fraction(c)) for n, c in data["coeffs"]]
        except (KeyError, TypeError, ValueError) as e:
            raise SeriesError(f"Serie JSON mal formada: {e}")
        if den not in (1, 2):
            raise SeriesError(f"Denominador de exponentes no soportado: {den}")
        factor = 2 // den
        coeffs = {n * factor: c for n, c in pairs}
        if "cutoff" in data:
            cutoff2 = int(data["cutoff"]) * factor
        else:
            cutoff2 = max(coeffs) if coeffs else 0
        return cls(coeffs, cutoff2)

    def __repr__(self) -> str:
        shown = []
        for n, c in self.items()[:6]:
            exp = str(Fraction(n, 2))
            shown.append(f"{c}·q^{exp}" if n else str(c))
        tail = " + …" if len(self._coeffs) > 6 else ""
        return f"QSeries({' + '.join(shown) or '0'}{tail}; O(q^{self.cutoff2 + 1}/2))"


def eisenstein(k2: int, scale: Number = 1, cutoff: int = 10) -> QSeries:
    """
    Serie de Eisenstein G_k(sτ) = -B_k/(2k) + Σ σ_{k-1}(n) q^{sn}.

    Args:
        k2: Peso par positivo
        scale: Sustitución τ → sτ con s ∈ {1/2, 1, 2}
        cutoff: Último exponente entero de q conservado

    Returns:
        QSeries exacta hasta q^cutoff
    """
    scale = Fraction(scale)
    if k2 < 2 or k2 % 2:
        raise SeriesError(f"Peso de Eisenstein inválido: {k2}")
    if scale not in SUPPORTED_SCALES:
        raise SeriesError(f"Escala no soportada: {scale}")
    b = bernoulli(k2)
    coeffs: Dict[int, Fraction] = {0: -Fraction(int(b.p), int(b.q)) / (2 * k2)}
    cutoff2 = 2 * cutoff
    n = 1
    while 2 * scale * n <= cutoff2:
        coeffs[int(2 * scale * n)] = Fraction(int(divisor_sigma(n, k2 - 1)))
        n += 1
    return QSeries(coeffs, cutoff2)


def eisenstein_constant(k2: int) -> Fraction:
    """Término constante -B_k/(2k)."""
    b = bernoulli(k2)
    return -Fraction(int(b.p), int(b.q)) / (2 * k2)
