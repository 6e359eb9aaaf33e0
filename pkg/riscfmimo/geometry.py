"""
Node placement in the D x D deployment square and 3-D distances.

Positions are rows ``(x_km, y_km, z_m)``: horizontal coordinates in km, height in m.
The square has no wrap-around, so nodes near the border see fewer neighbours.
"""

import csv
import logging
from dataclasses import dataclass

import numpy as np


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Topology:
    ap_positions: np.ndarray
    ris_positions: np.ndarray
    user_positions: np.ndarray

    @property
    def counts(self):
        return len(self.ap_positions), len(self.ris_positions), len(self.user_positions)


def _place(rng, count, side_km, height_m):
    positions = np.empty((count, 3))
    positions[:, :2] = rng.uniform(0.0, side_km, size=(count, 2))
    positions[:, 2] = height_m
    return positions


def draw_topology(cfg, seed):
    """
    Draws independent uniform x, y for every AP, RIS and user. Each node type uses its
    own stream so that changing e.g. the surface count leaves AP and user positions
    untouched (and the first S surfaces of a larger deployment coincide with a smaller one).

    :param cfg: ScenarioConfig
    :param seed: SeedContext carrying the topology index
    """
    side = cfg.area_side_km
    return Topology(
        ap_positions=_place(seed.derive(purpose='ap_positions').rng(), cfg.ap_count, side, cfg.ap_height_m),
        ris_positions=_place(seed.derive(purpose='ris_positions').rng(), cfg.ris_count, side, cfg.ris_height_m),
        user_positions=_place(seed.derive(purpose='user_positions').rng(), cfg.user_count, side,
                              cfg.user_height_m))


def distance_m(a, b):
    """
    Euclidean 3-D distance in metres between position(s) ``a`` and ``b``.
    Broadcasts over leading dimensions.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dxy_m = (a[..., :2] - b[..., :2]) * 1000.0
    dz_m = a[..., 2] - b[..., 2]
    return np.sqrt(np.sum(dxy_m ** 2, axis=-1) + dz_m ** 2)


def pairwise_distance_m(a, b):
    """ Matrix of distances, entry [i, j] between a[i] and b[j]. """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return distance_m(a[:, np.newaxis, :], b[np.newaxis, :, :])


def write_topology_csv(topology, path):
    """ Dumps node positions with columns node_type, index, x_km, y_km, z_m. """
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['node_type', 'index', 'x_km', 'y_km', 'z_m'])
        for node_type, positions in (('ap', topology.ap_positions),
                                     ('ris', topology.ris_positions),
                                     ('user', topology.user_positions)):
            for i, (x, y, z) in enumerate(positions):
                writer.writerow([node_type, i, repr(float(x)), repr(float(y)), repr(float(z))])

    logger.debug('Wrote topology to {}'.format(path))
