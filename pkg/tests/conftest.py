"""Shared test helpers: randomized scene/winding generation."""

import math

from capstan.geometry import CapstanObject, Scene, Winding, WindingSpec, WindingStep


def random_scene_and_winding(rng, n_capstans=None, max_turns=1):
    """A random disjoint scene plus a random winding over distinct capstans.

    Anchor and load are placed outside the capstan field so they can never
    fall inside a disk.
    """
    n = int(n_capstans if n_capstans is not None else rng.integers(1, 4))
    capstans = []
    tries = 0
    while len(capstans) < n and tries < 500:
        tries += 1
        c = (rng.uniform(-5, 5), rng.uniform(-5, 5))
        r = rng.uniform(0.3, 1.0)
        if all(math.dist(c, o.center) > r + o.radius + 0.2 for o in capstans):
            capstans.append(CapstanObject(f"c{len(capstans)}", c, r, "redwood"))
    scene = Scene(tuple(capstans))
    order = list(rng.permutation(len(capstans)))
    k = int(rng.integers(1, len(capstans) + 1))
    steps = tuple(
        WindingStep(capstans[i].id,
                    Winding.CCW if rng.random() < 0.5 else Winding.CW,
                    int(rng.integers(0, max_turns + 1)))
        for i in order[:k])
    anchor = (rng.uniform(-9, -7), rng.uniform(-3, 3))
    load = (rng.uniform(7, 9), rng.uniform(-3, 3))
    return scene, WindingSpec(steps), anchor, load
