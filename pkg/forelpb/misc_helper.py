from typing import Any, List, Sequence, Union

import numpy as np

RANDOM_INTERIOR_LOW = 0.05
RANDOM_INTERIOR_HIGH = 0.95


# Using Union as `X | Y syntax for unions requires Python 3.10`
def brief_list(lst: Union[list, np.ndarray[Any, Any]], max_items: int = 6) -> str:
    """
    Formats a list showing at most ``max_items`` items (head and tail).
    """
    if len(lst) > max_items:
        half = max_items // 2
        rest = max_items - half
        prefix = ", ".join(str(x) for x in lst[:half])
        postfix = ", ".join(str(x) for x in lst[-rest:])
        return f"[{prefix}, ..., {postfix}]"
    return str(list(lst))


def random_interior(seed: int, n: int) -> np.ndarray:
    """Mixed profile drawn uniformly from [0.05, 0.95]^n with a seeded generator."""
    rng = np.random.default_rng(seed)
    return rng.uniform(RANDOM_INTERIOR_LOW, RANDOM_INTERIOR_HIGH, n)


def parse_floats(text: str) -> List[float]:
    """
    "0.3,0.6, 0.3" -> [0.3, 0.6, 0.3]
    """
    items = [s.strip() for s in text.split(",")]
    if not items or any(s == "" for s in items):
        raise ValueError(f"expecting comma-separated numbers: '{text}'")
    return [float(s) for s in items]


def parse_seeds(text: str) -> List[int]:
    """
    Comma-separated seeds and inclusive ranges: "1,4-6" -> [1, 4, 5, 6].
    """
    res: List[int] = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        if "-" in item[1:]:
            lo, hi = item.split("-", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise ValueError(f"empty seed range '{item}'")
            res.extend(range(a, b + 1))
        else:
            res.append(int(item))
    return res


def format_vector(v: Sequence[float], digits: int = 6) -> str:
    return "(" + ", ".join(f"{float(a):.{digits}g}" for a in v) + ")"
