"""Random finite-order matrices, unimodular changes of basis and group
actions on fans, shared by the unit and acceptance tests."""

import random

# finite-order integer blocks: (matrix, order)
BLOCKS = [
    (((1,),), 1),
    (((-1,),), 2),
    (((0, 1), (1, 0)), 2),
    (((-1, 0), (1, 1)), 2),
    (((0, -1), (1, 0)), 4),
    (((0, -1), (1, -1)), 3),
    (((1, -1), (1, 0)), 6),
    (((0, 0, 1), (1, 0, 0), (0, 1, 0)), 3),
    (((-1, 0), (0, -1)), 2),
]


def block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return tuple(tuple(r) for r in out)


def mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def random_unimodular(rng, n, steps=6):
    """Product of elementary matrices; returns ``(P, P^-1)``."""
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    q = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n == 1:
            break
        i, j = rng.sample(range(n), 2)
        f = rng.choice([-2, -1, 1, 2])
        # P <- P E with E = I + f e_ij ; P^-1 <- E^-1 P^-1
        for r in range(n):
            p[r][j] += f * p[r][i]
        for c in range(n):
            q[i][c] -= f * q[j][c]
    return tuple(map(tuple, p)), tuple(map(tuple, q))


def random_finite_order(rng, max_rank=5):
    blocks = []
    size = 0
    target = rng.randint(1, max_rank)
    while size < target:
        b, _ = rng.choice([x for x in BLOCKS if len(x[0]) <= max_rank - size])
        blocks.append(b)
        size += len(b)
    g = block_diag(blocks)
    p, q = random_unimodular(rng, len(g))
    return mul(mul(p, g), q)


def random_signed_permutation(rng, n):
    perm = list(range(n))
    rng.shuffle(perm)
    m = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        m[j][i] = rng.choice([1, -1])
    return tuple(map(tuple, m))


def orthant_fan_with_group(seed, n=None):
    """Maximal cones of the coordinate-orthant fan and signed-permutation
    generators, all conjugated by a random unimodular matrix."""
    rng = random.Random(seed)
    n = n or rng.randint(1, 3)
    p, q = random_unimodular(rng, n)
    cones = []
    for signs in range(2 ** n):
        rays = []
        for i in range(n):
            e = [0] * n
            e[i] = -1 if signs >> i & 1 else 1
            rays.append(tuple(e))
        cones.append([tuple(sum(p[r][k] * v[k] for k in range(n)) for r in range(n)) for v in rays])
    gens = [mul(mul(p, random_signed_permutation(rng, n)), q) for _ in range(rng.randint(1, 2))]
    return n, cones, gens


def projective_plane_fan():
    """Fan of P^2 (rays e1, e2, -e1-e2) with the symmetric group on the rays."""
    rays = [(1, 0), (0, 1), (-1, -1)]
    cones = [[rays[0], rays[1]], [rays[1], rays[2]], [rays[2], rays[0]]]
    gens = [((0, 1), (1, 0)), ((0, -1), (1, -1))]
    return cones, gens


__all__ = [
    "BLOCKS",
    "block_diag",
    "mul",
    "orthant_fan_with_group",
    "projective_plane_fan",
    "random_finite_order",
    "random_signed_permutation",
    "random_unimodular",
]
