import numpy as np

from tailgen.sketch import extract_sketch


def test_constant_image_has_no_edges():
    assert extract_sketch(np.full((16, 16), 0.7)).sum() == 0
    assert extract_sketch(np.zeros((16, 16))).sum() == 0


def test_vertical_step_edge_lands_on_adjacent_columns():
    img = np.zeros((16, 16))
    img[:, 8:] = 1.0
    sk = extract_sketch(img)
    on_cols = sorted(set(np.nonzero(sk)[1].tolist()))
    assert on_cols == [7, 8]
    # every row fires on the edge
    assert np.all(sk[:, 7] == 1) and np.all(sk[:, 8] == 1)


def test_binary_disk_edge_is_a_closed_ring():
    yy, xx = np.mgrid[0:16, 0:16].astype(float)
    disk = ((xx - 7.5) ** 2 + (yy - 7.5) ** 2 <= 5.0 ** 2).astype(float)
    sk = extract_sketch(disk)
    ys, xs = np.nonzero(sk)
    assert len(ys) > 8
    # closed contour: every edge pixel touches at least two other edge pixels
    for y, x in zip(ys, xs):
        neigh = sk[max(0, y - 1):y + 2, max(0, x - 1):x + 2].sum() - 1
        assert neigh >= 2
    # interior of the disk stays clear
    assert sk[7:9, 7:9].sum() == 0


def test_output_is_binary():
    rng = np.random.default_rng(0)
    sk = extract_sketch(rng.uniform(size=(16, 16)))
    assert set(np.unique(sk)).issubset({0, 1})
