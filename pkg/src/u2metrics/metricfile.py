"""Plain-text serialization of a MetricSpec.

Format (one directive per line, ``#`` starts a comment):

    name <text>
    domain <a> <b> <open|closed> <open|closed>
    F canonical <C1> <C2> <C3> <C4>
    F term <p[/q]> <coeff>            # repeatable; q in {1, 2}
    C exp C0=<v> eps=<+1|-1>
    C einstein C5=<v> C6=<v>
    C ratio                           # followed by num/den term lines
    num term <p[/q]> <coeff>
    den term <p[/q]> <coeff>
    tag <Jplus|Jminus>

Numbers are decimals or exact rationals ``p/q`` (rationals parse to Fraction
and stay exact).  Emission is canonical, so emit → parse → emit is textually
idempotent.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

from .exppoly import ExpPoly
from .profiles import (
    Canonical,
    Domain,
    EinsteinFactor,
    ExpFactor,
    MetricSpec,
    RatioFactor,
    Squared,
    profile_poly,
)

__all__ = ["MetricFileError", "parse_metric", "emit_metric"]


class MetricFileError(ValueError):
    """Parse failure; message carries the 1-based line number."""

    def __init__(self, lineno: Optional[int], message: str):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def _parse_number(tok: str, lineno: int):
    """Decimal -> float; ``p/q`` or bare integer -> exact Fraction."""
    try:
        if "/" in tok:
            return Fraction(tok)
        if tok.lstrip("+-").isdigit():
            return Fraction(int(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise MetricFileError(lineno, f"bad number {tok!r}: {exc}") from None


def _parse_endpoint(tok: str, lineno: int) -> float:
    low = tok.lower()
    if low in ("-inf", "-infinity"):
        return -math.inf
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    v = _parse_number(tok, lineno)
    return float(v)


def _parse_kv(tok: str, key: str, lineno: int):
    if not tok.startswith(key + "="):
        raise MetricFileError(lineno, f"expected {key}=<value>, got {tok!r}")
    return _parse_number(tok[len(key) + 1 :], lineno)


def parse_metric(text: str) -> MetricSpec:
    name = None
    domain = None
    tag = None
    f_canonical = None
    f_terms = []
    c_model = None
    c_mode = None  # None | "ratio"
    num_terms = []
    den_terms = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]

        if head == "name":
            if len(toks) < 2:
                raise MetricFileError(lineno, "name requires a value")
            name = " ".join(toks[1:])
        elif head == "domain":
            if len(toks) != 5:
                raise MetricFileError(lineno, "domain requires: <a> <b> <open|closed> <open|closed>")
            a = _parse_endpoint(toks[1], lineno)
            b = _parse_endpoint(toks[2], lineno)
            flags = []
            for t in toks[3:5]:
                if t not in ("open", "closed"):
                    raise MetricFileError(lineno, f"endpoint flag must be open or closed, got {t!r}")
                flags.append(t == "closed")
            try:
                domain = Domain(a, b, lo_closed=flags[0], hi_closed=flags[1])
            except ValueError as exc:
                raise MetricFileError(lineno, str(exc)) from None
        elif head == "F":
            if len(toks) >= 2 and toks[1] == "canonical":
                if len(toks) != 6:
                    raise MetricFileError(lineno, "F canonical requires 4 coefficients")
                f_canonical = tuple(_parse_number(t, lineno) for t in toks[2:6])
            elif len(toks) == 4 and toks[1] == "term":
                f_terms.append((_parse_number(toks[2], lineno), _parse_number(toks[3], lineno)))
            else:
                raise MetricFileError(lineno, "F requires 'canonical C1 C2 C3 C4' or 'term p coeff'")
        elif head == "C":
            if len(toks) >= 2 and toks[1] == "exp":
                if len(toks) != 4:
                    raise MetricFileError(lineno, "C exp requires C0=<v> eps=<+1|-1>")
                c0 = _parse_kv(toks[2], "C0", lineno)
                eps = _parse_kv(toks[3], "eps", lineno)
                if eps not in (1, -1):
                    raise MetricFileError(lineno, f"eps must be +1 or -1, got {eps}")
                try:
                    c_model = ExpFactor(float(c0), int(eps))
                except ValueError as exc:
                    raise MetricFileError(lineno, str(exc)) from None
            elif len(toks) >= 2 and toks[1] == "einstein":
                if len(toks) != 4:
                    raise MetricFileError(lineno, "C einstein requires C5=<v> C6=<v>")
                c5 = _parse_kv(toks[2], "C5", lineno)
                c6 = _parse_kv(toks[3], "C6", lineno)
                c_model = EinsteinFactor(float(c5), float(c6))
            elif len(toks) == 2 and toks[1] == "ratio":
                c_mode = "ratio"
            else:
                raise MetricFileError(lineno, "C requires 'exp', 'einstein', or 'ratio'")
        elif head in ("num", "den"):
            if c_mode != "ratio":
                raise MetricFileError(lineno, f"{head} lines require a preceding 'C ratio'")
            if len(toks) != 4 or toks[1] != "term":
                raise MetricFileError(lineno, f"{head} requires: term <p> <coeff>")
            pair = (_parse_number(toks[2], lineno), _parse_number(toks[3], lineno))
            (num_terms if head == "num" else den_terms).append(pair)
        elif head == "tag":
            if len(toks) != 2 or toks[1] not in ("Jplus", "Jminus", "Iplus", "Iminus"):
                raise MetricFileError(lineno, "tag must be Jplus, Jminus, Iplus, or Iminus")
            tag = toks[1]
        else:
            raise MetricFileError(lineno, f"unknown directive {head!r}")

    if name is None:
        raise MetricFileError(None, "missing 'name' line")
    if domain is None:
        raise MetricFileError(None, "missing 'domain' line")
    if f_canonical is not None and f_terms:
        raise MetricFileError(None, "F given both as canonical and as term lines")
    if f_canonical is not None:
        profile: Union[Canonical, ExpPoly] = Canonical(*f_canonical)
    elif f_terms:
        try:
            profile = ExpPoly(f_terms)
        except (ValueError, ArithmeticError) as exc:
            raise MetricFileError(None, f"bad F terms: {exc}") from None
    else:
        raise MetricFileError(None, "missing F definition")
    if c_mode == "ratio":
        if not num_terms or not den_terms:
            raise MetricFileError(None, "C ratio requires num and den term lines")
        try:
            c_model = RatioFactor(ExpPoly(num_terms), ExpPoly(den_terms))
        except (ValueError, ArithmeticError) as exc:
            raise MetricFileError(None, f"bad ratio terms: {exc}") from None
    if c_model is None:
        raise MetricFileError(None, "missing C definition")
    try:
        return MetricSpec(name=name, F=profile, C=c_model, domain=domain, tag=tag)
    except ValueError as exc:
        raise MetricFileError(None, str(exc)) from None


# --------------------------------------------------------------------- emission
def _fmt_number(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _fmt_endpoint(v: float) -> str:
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return _fmt_number(v)


def _term_lines(prefix: str, poly: ExpPoly) -> list:
    return [f"{prefix} term {_fmt_number(k)} {_fmt_number(c)}" for k, c in poly.terms()]


def emit_metric(m: MetricSpec) -> str:
    lines = [f"name {m.name}"]
    d = m.domain
    lines.append(
        "domain {} {} {} {}".format(
            _fmt_endpoint(d.lo),
            _fmt_endpoint(d.hi),
            "closed" if d.lo_closed else "open",
            "closed" if d.hi_closed else "open",
        )
    )
    profile = m.F
    if isinstance(profile, Squared):
        profile = profile_poly(profile)
    if isinstance(profile, Canonical):
        lines.append(
            "F canonical {} {} {} {}".format(
                *(_fmt_number(c) for c in (profile.c1, profile.c2, profile.c3, profile.c4))
            )
        )
    else:
        lines.extend(_term_lines("F", profile))
    c = m.C
    if isinstance(c, ExpFactor):
        lines.append(f"C exp C0={_fmt_number(c.c0)} eps={'+1' if c.eps > 0 else '-1'}")
    elif isinstance(c, EinsteinFactor):
        lines.append(f"C einstein C5={_fmt_number(c.c5)} C6={_fmt_number(c.c6)}")
    elif isinstance(c, RatioFactor):
        lines.append("C ratio")
        lines.extend(_term_lines("num", c.num))
        lines.extend(_term_lines("den", c.den))
    else:
        raise TypeError(f"cannot emit conformal model {type(c).__name__}")
    if m.tag is not None:
        lines.append(f"tag {m.tag}")
    return "\n".join(lines) + "\n"
