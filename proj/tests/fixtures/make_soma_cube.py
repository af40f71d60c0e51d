"""Writes soma_cube_7.json: one exact cover of the 3x3x3 cube by the seven soma pieces.

Pass a solution index as the first argument to pick a different cover.
"""
import itertools
import json
import sys

PIECES = {
    "V": [(0, 0, 0), (1, 0, 0), (0, 1, 0)],
    "L": [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0)],
    "T": [(0, 0, 0), (1, 0, 0), (2, 0, 0), (1, 1, 0)],
    "Z": [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0)],
    "A": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 0, 1)],
    "B": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 1, 1)],
    "P": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
}


def rotations():
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = [[0] * 3 for _ in range(3)]
            for r in range(3):
                m[r][perm[r]] = signs[r]
            det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                   - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                   + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            if det == 1:
                mats.append(m)
    return mats


def placements(cells):
    out = set()
    for m in rotations():
        rot = [tuple(sum(m[r][k] * c[k] for k in range(3)) for r in range(3)) for c in cells]
        lo = [min(c[k] for c in rot) for k in range(3)]
        norm = [tuple(c[k] - lo[k] for k in range(3)) for c in rot]
        hi = [max(c[k] for c in norm) for k in range(3)]
        for t in itertools.product(*(range(3 - hi[k]) for k in range(3))):
            out.add(tuple(sorted(tuple(c[k] + t[k] for k in range(3)) for c in norm)))
    return sorted(out)


def bits(cells):
    return sum(1 << (c[0] * 9 + c[1] * 3 + c[2]) for c in cells)


def solve(limit):
    names = list(PIECES)
    options = {n: [(bits(p), p) for p in placements(PIECES[n])] for n in names}
    solutions = []

    def rec(i, used, chosen):
        if len(solutions) >= limit:
            return
        if i == len(names):
            solutions.append(dict(chosen))
            return
        for b, p in options[names[i]]:
            if not used & b:
                chosen[names[i]] = p
                rec(i + 1, used | b, chosen)
                del chosen[names[i]]

    rec(0, 0, {})
    return solutions


def main():
    index = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    solutions = solve(index + 1)
    sol = solutions[index]
    size = 0.02
    pieces = []
    for name in PIECES:
        cells = sol[name]
        lo = [min(c[k] for c in cells) for k in range(3)]
        local = [[c[k] - lo[k] for k in range(3)] for c in cells]
        pieces.append({
            "id": name,
            "voxels": local,
            "voxel_size": size,
            "density": 700,
            "goal_pose": {"rotation": [1, 0, 0, 0], "translation": [lo[0] * size, lo[1] * size, lo[2] * size]},
        })
    scene = {"table_height": 0.0, "gravity": [0, 0, -9.81], "friction": {"default_mu": 0.3, "overrides": []},
             "workpieces": pieces}
    json.dump(scene, sys.stdout, indent=1)


if __name__ == "__main__":
    main()
