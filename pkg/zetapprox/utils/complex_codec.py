"""Text codec for complex numbers in the "x+yi" form used by configs and CSV files."""
import math


def _format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def format_complex(z: complex) -> str:
    """Format as "x+yi" with 17 significant digits, so parsing gives back the same value."""
    z = complex(z)
    imag = _format_real(z.imag)
    if not imag.startswith("-"):
        imag = "+" + imag
    return f"{_format_real(z.real)}{imag}i"


def parse_complex(value: str | int | float | complex) -> complex:
    """Parse "x+yi", "x", "yi" or a plain number.

    Raises:
        ValueError: If the value is not a complex number.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a complex number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    text = str(value).strip().replace(" ", "")
    if not text or "j" in text:
        raise ValueError(f"Not a complex number: {value!r}")
    if text.endswith("i"):
        text = text[:-1] + "j"
    try:
        return complex(text)
    except ValueError:
        raise ValueError(f"Not a complex number: {value!r}") from None
