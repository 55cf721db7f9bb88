import numpy as np
import pytest

from aifml.dataio import (
    Dataset,
    DatasetError,
    demo_target,
    generate_demo_dataset,
    load_dataset,
    rmse,
    save_dataset,
    split,
)
from aifml.pso import fitness_mse

from oracle import naive_infer


def test_load_two_rows(demo_sys):
    text = "temp,humidity,ac_level\n35,80,8.4\n10,30,1.0\n"
    data = load_dataset(text, demo_sys)
    assert data.n_rows == 2
    assert data.column("humidity").tolist() == [80.0, 30.0]
    assert data.roles[data.columns.index("ac_level")] == "output"


def test_load_column_order_independent(demo_sys):
    a = load_dataset("temp,humidity,ac_level\n35,80,8.4\n", demo_sys)
    b = load_dataset("ac_level,temp,humidity\n8.4,35,80\n", demo_sys)
    assert a.column("temp").tolist() == b.column("temp").tolist()


def test_load_missing_output_column(demo_sys):
    with pytest.raises(DatasetError, match="ac_level"):
        load_dataset("temp,humidity\n35,80\n", demo_sys)


def test_load_extra_column_rejected(demo_sys):
    with pytest.raises(DatasetError, match="pressure"):
        load_dataset("temp,humidity,ac_level,pressure\n35,80,8.4,1\n", demo_sys)


def test_load_non_numeric_cell_cites_position(demo_sys):
    text = "temp,humidity,ac_level\n1,2,3\n4,5,6\n7,warm,9\n"
    with pytest.raises(DatasetError, match=r"row 3, column 2"):
        load_dataset(text, demo_sys)


def test_load_empty_file(demo_sys):
    with pytest.raises(DatasetError, match="empty"):
        load_dataset("", demo_sys)


def test_load_tolerates_crlf(demo_sys):
    data = load_dataset("temp,humidity,ac_level\r\n35,80,8.4\r\n", demo_sys)
    assert data.n_rows == 1


def test_save_load_roundtrip_exact(demo_sys, demo_data):
    again = load_dataset(save_dataset(demo_data), demo_sys)
    assert np.array_equal(again.values, demo_data.values)  # repr round-trip is exact


def test_split_partition():
    data = Dataset(("a", "b"), np.arange(20.0).reshape(10, 2), ("input", "output"))
    train, test = split(data, 0.8, seed=1)
    assert train.n_rows == 8 and test.n_rows == 2
    merged = np.vstack([train.values, test.values])
    assert sorted(map(tuple, merged)) == sorted(map(tuple, data.values))


def test_split_seeded_repeatable():
    data = Dataset(("a", "b"), np.arange(20.0).reshape(10, 2), ("input", "output"))
    first = split(data, 0.7, seed=9)
    second = split(data, 0.7, seed=9)
    assert np.array_equal(first[0].values, second[0].values)
    assert np.array_equal(first[1].values, second[1].values)


def test_split_degenerate_fraction():
    data = Dataset(("a", "b"), np.arange(20.0).reshape(10, 2), ("input", "output"))
    with pytest.raises(DatasetError, match="empty test set"):
        split(data, 0.95, seed=0)


def test_rmse_perfect_and_constant_error(demo_sys, demo_data):
    from aifml.inference import infer
    rows = demo_data.values[:3, :2]
    outputs = [infer(demo_sys, {"temp": t, "humidity": h}).outputs["ac_level"]
               for t, h in rows]
    exact = Dataset(demo_data.columns,
                    np.column_stack([rows, outputs]), demo_data.roles)
    assert rmse(demo_sys, exact) == 0.0
    shifted = Dataset(demo_data.columns,
                      np.column_stack([rows, np.array(outputs) - 0.25]), demo_data.roles)
    assert rmse(demo_sys, shifted) == pytest.approx(0.25)


def test_demo_rmse_matches_oracle_composition(demo_sys, demo_data):
    total = 0.0
    for row in demo_data.values:
        predicted = naive_infer(demo_sys, {"temp": row[0], "humidity": row[1]},
                                resolution=100_000)
        total += (predicted["ac_level"] - row[2]) ** 2
    oracle_rmse = float(np.sqrt(total / demo_data.n_rows))
    assert rmse(demo_sys, demo_data) == pytest.approx(oracle_rmse, abs=1e-3 * 10.0)


def test_bundled_dataset_matches_generator(demo_data):
    regenerated = generate_demo_dataset()
    assert np.array_equal(demo_data.values, regenerated.values)
    assert demo_data.n_rows == 50


def test_demo_target_clipped():
    assert demo_target(0, 0) == 0.0
    assert demo_target(40, 100) == 10.0
