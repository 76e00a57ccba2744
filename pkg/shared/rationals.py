"""Conversão exata de parâmetros racionais (ε, fator de poda)."""
import math
from fractions import Fraction

from core.exceptions import InputError


def parse_rational(text: str | Fraction | int, allow_infinite: bool = False) -> Fraction | float:
    """
    Aceita `p/q`, decimal ou inteiro sem perder precisão.

    Args:
        allow_infinite: aceita "inf" e devolve math.inf.
    """
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    raw = str(text).strip()
    if allow_infinite and raw.lower() in ("inf", "infinity", "∞"):
        return math.inf
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"racional inválido: {text!r}") from exc


def parse_positive(text: str | Fraction | int, allow_infinite: bool = False) -> Fraction | float:
    value = parse_rational(text, allow_infinite)
    if value <= 0:
        raise InputError(f"valor deve ser positivo: {text!r}")
    return value
