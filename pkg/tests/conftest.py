import json
import os

import pytest

from dickesim.fock import LossConfig, SpdcConfig, simulate_experiment

CALIBRATION_PATH = os.path.join(
    os.path.dirname(__file__), "..", "data", "calibration.json"
)


@pytest.fixture(scope="session")
def calibration_record() -> dict:
    with open(CALIBRATION_PATH) as fh:
        return json.load(fh)["picked"]


@pytest.fixture(scope="session")
def noisy_simulation(calibration_record):
    # one full simulation at the recorded operating point, shared by every
    # test that needs the noisy six-qubit state
    return simulate_experiment(
        SpdcConfig(
            lam=calibration_record["lambda"],
            max_order=calibration_record["max_order"],
        ),
        LossConfig(
            eta_h=calibration_record["eta_H"],
            eta_v=calibration_record["eta_V"],
        ),
    )


@pytest.fixture(scope="session")
def rho_sim(noisy_simulation):
    return noisy_simulation.rho_sim
