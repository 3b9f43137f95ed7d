"""Koszul sign helpers.  All signs are returned as +1 / -1 integers."""


def parity_sign(n):
    return -1 if n % 2 else 1


def koszul(a, b):
    """Sign for moving something of degree a past something of degree b."""
    return -1 if (a % 2 and b % 2) else 1


def sort_sign(items, degree):
    """
    Stable-sort ``items`` and return (sorted tuple, sign), where the sign is the
    Koszul sign of the permutation with respect to ``degree(item)``.
    """
    seq = list(items)
    sign = 1
    # insertion sort keeps track of each transposition of neighbours
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            if degree(seq[j - 1]) % 2 and degree(seq[j]) % 2:
                sign = -sign
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            j -= 1
    return tuple(seq), sign
