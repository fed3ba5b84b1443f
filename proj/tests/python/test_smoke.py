import math

import numpy as np
import pytest

import flatlens


def test_centre_tensors():
    (exx, eyy, ezz), (mxx, myy, mzz) = flatlens.compute_tensors(0.0, 0.0)
    assert (exx, eyy, ezz) == pytest.approx((16.0, 16.0, 0.25), rel=1e-12)
    assert (mxx, myy, mzz) == pytest.approx((8.0, 8.0, 0.125), rel=1e-12)
    assert flatlens.center_permittivity(flatlens.LensSpec()) == pytest.approx(16.0)


def test_luneburg_profile_and_domain():
    assert flatlens.luneburg_eps(0.0, 32.0) == 2.0
    assert flatlens.luneburg_eps(32.0, 32.0) == pytest.approx(1.0)
    with pytest.raises(flatlens.DomainError):
        flatlens.luneburg_eps(33.0, 32.0)


def test_mapping_round_trip():
    spec = flatlens.LensSpec()
    y, z = flatlens.forward_map(10.0, 20.0, spec)
    assert y == 10.0
    assert z == pytest.approx(4.0 * 20.0 / math.sqrt(32.0**2 - 10.0**2))
    assert flatlens.inverse_map(y, z, spec)[1] == pytest.approx(20.0, rel=1e-12)


def test_invalid_spec():
    with pytest.raises(flatlens.ConfigError):
        flatlens.LensSpec(weight_period_mm=7.0)


def test_material_map_arrays():
    y, z, eps = flatlens.material_map(step_mm=0.5)
    assert eps.shape == (y.size, z.size)
    assert y[0] == pytest.approx(-32.0) and z[-1] == pytest.approx(4.0)
    assert eps.min() >= 1.0 and eps.max() <= 16.0
    centre = eps[np.argmin(np.abs(y)), np.argmin(np.abs(z))]
    assert 15.5 <= centre <= 16.0


def test_slab_retrieval_round_trip():
    f = np.linspace(30.0, 40.0, 21)
    s = [flatlens.slab_sparams(4.0, 1.0, 0.508, fi) for fi in f]
    out = flatlens.retrieve(f, [a for a, _ in s], [b for _, b in s], 0.508)
    assert np.allclose(out["eps"], 4.0, atol=1e-6)
    assert np.allclose(out["mu"], 1.0, atol=1e-6)


def test_config_errors_name_the_key():
    with pytest.raises(flatlens.ConfigError, match="sim.cells_per_wavelength"):
        flatlens.PipelineConfig.parse("[sim]\ncells_per_wavelength = 4\n")
    c = flatlens.PipelineConfig.parse("[sim]\nfeed_offsets_mm = 0, 4\n")
    assert c.feed_offsets_mm == [0.0, 4.0]
    assert flatlens.PipelineConfig.parse(c.to_ini()).to_ini() == c.to_ini()


def test_cmd_material_writes_files(tmp_path):
    c = flatlens.PipelineConfig.parse("[lens]\nsample_step_mm = 0.5\n")
    written = flatlens.cmd_material(c, tmp_path)
    assert "material_reduced.csv" in written
    assert (tmp_path / "manifest.json").exists()
