import numpy as np


def truncated_division(m: int, n: int) -> int:
    """
    Integer division rounding toward zero.
    :raises ZeroDivisionError: if n is 0
    """
    quotient = abs(m) // abs(n)
    return quotient if (m >= 0) == (n >= 0) else -quotient


def apply_binary_operator(opname: str, m: int, n: int) -> int:
    """
    Applies a binary operator of the language to two integers. Comparisons and boolean operators return 1 or 0.
    `/` truncates toward zero and `%` takes the sign of the dividend.
    :raises ZeroDivisionError: on `/` or `%` by zero
    :raises ValueError: on an unknown operator
    """
    match opname:
        case "+":
            return m + n
        case "-":
            return m - n
        case "*":
            return m * n
        case "/":
            return truncated_division(m, n)
        case "%":
            return m - n * truncated_division(m, n)
        case "==":
            return int(m == n)
        case "<>":
            return int(m != n)
        case "<=":
            return int(m <= n)
        case "<":
            return int(m < n)
        case "&&":
            return int(m != 0 and n != 0)
        case "||":
            return int(m != 0 or n != 0)
    raise ValueError(f"Unknown operator '{opname}'")


def fit_linear(xs, ys) -> tuple[float, float, float]:
    """
    Least-squares fit y = slope * x + intercept.
    :return: (slope, intercept, coefficient of determination R²)
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) < 2:
        raise ValueError("fit_linear needs at least two points")
    slope, intercept = np.polyfit(x, y, 1)
    residual = np.sum((y - (slope * x + intercept)) ** 2)
    total = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 if total == 0 else 1.0 - residual / total
    return float(slope), float(intercept), float(r2)
