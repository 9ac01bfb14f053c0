import json

import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import ErrorCode, FileException
from app.schemas.imaging_schemas import DataMatrix
from app.services.signal_service import dft_grid
from app.utils.file_utils import (
    file_sha256,
    load_data_matrix,
    read_csv_file,
    save_data_matrix,
    save_dataframe_to_csv,
    save_json,
)


@pytest.fixture
def data_matrix() -> DataMatrix:
    grid = dft_grid(4.0, 16.0, 20.0)
    rng = np.random.default_rng(11)
    values = rng.standard_normal((6, grid.size)) + 1j * rng.standard_normal((6, grid.size))
    return DataMatrix(grid=grid, values=values, meta={"kind": "Ball", "epsilon": 0.01})


def test_data_matrix_round_trip(tmp_path, data_matrix):
    path = save_data_matrix(data_matrix, tmp_path / "data.bsid", header_extra={"config_hash": "abc"})
    loaded = load_data_matrix(path)
    np.testing.assert_array_equal(loaded.values, data_matrix.values)
    np.testing.assert_array_equal(loaded.grid.omegas, data_matrix.grid.omegas)
    np.testing.assert_array_equal(loaded.grid.weights, data_matrix.grid.weights)
    assert loaded.grid.period == data_matrix.grid.period
    assert loaded.meta == {"kind": "Ball", "epsilon": 0.01, "config_hash": "abc"}


def test_data_matrix_is_byte_stable(tmp_path, data_matrix):
    a = save_data_matrix(data_matrix, tmp_path / "a.bsid")
    b = save_data_matrix(data_matrix, tmp_path / "b.bsid")
    assert file_sha256(a) == file_sha256(b)


def test_data_matrix_payload_is_complex128(tmp_path, data_matrix):
    save_data_matrix(data_matrix, tmp_path / "data.bsid")
    raw = (tmp_path / "data.bsid").read_bytes()
    header_len = int.from_bytes(raw[8:12], "little")
    header = json.loads(raw[12:12 + header_len])
    payload = raw[12 + header_len:]
    assert header["dtype"] == "<c16"
    assert len(payload) == 16 * data_matrix.values.size
    np.testing.assert_array_equal(
        np.frombuffer(payload, dtype="<c16").reshape(data_matrix.values.shape), data_matrix.values
    )


def test_corrupted_container(tmp_path, data_matrix):
    path = tmp_path / "data.bsid"
    save_data_matrix(data_matrix, path)
    raw = path.read_bytes()

    path.write_bytes(b"NOTMAGIC" + raw[8:])
    with pytest.raises(FileException) as exc:
        load_data_matrix(path)
    assert exc.value.error_code == ErrorCode.FILE_FORMAT_ERROR

    for cut in (10, len(raw) - 16):
        path.write_bytes(raw[:cut])
        with pytest.raises(FileException) as exc:
            load_data_matrix(path)
        assert exc.value.error_code == ErrorCode.FILE_FORMAT_ERROR


def test_container_extension_and_existence(tmp_path):
    with pytest.raises(FileException) as exc:
        load_data_matrix(tmp_path / "data.npy")
    assert exc.value.error_code == ErrorCode.FILE_EXTENSION_ERROR
    with pytest.raises(FileException) as exc:
        load_data_matrix(tmp_path / "missing.bsid")
    assert exc.value.error_code == ErrorCode.FILE_NOT_FOUND


def test_csv_preserves_floats(tmp_path):
    df = pd.DataFrame({"x": [0.1, 1.0 / 3.0, 2.0 ** -40], "value": [np.pi, -np.e, 1e300]})
    path = save_dataframe_to_csv(df, tmp_path / "image.csv")
    back = read_csv_file(path, ["x", "value"])
    pd.testing.assert_frame_equal(back, df)


def test_csv_missing_columns(tmp_path):
    path = save_dataframe_to_csv(pd.DataFrame({"x": [1.0]}), tmp_path / "image.csv")
    with pytest.raises(FileException) as exc:
        read_csv_file(path, ["x", "value"])
    assert exc.value.error_code == ErrorCode.FILE_FORMAT_ERROR


def test_json_is_deterministic(tmp_path):
    a = save_json({"b": 1, "a": [1.5, 2.5]}, tmp_path / "a.json")
    b = save_json({"a": [1.5, 2.5], "b": 1}, tmp_path / "b.json")
    assert file_sha256(a) == file_sha256(b)
    c = save_json({"a": [1.5, 2.5], "b": 2}, tmp_path / "c.json")
    assert file_sha256(a) != file_sha256(c)
