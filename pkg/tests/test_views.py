import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from orlicz_kit.models import Base, Constant, Run, Trial
from orlicz_kit.views import get_constants, get_runs, get_trials


@pytest.fixture(scope="module")
def engine():
    return create_engine("sqlite:///:memory:")


@pytest.fixture(scope="module")
def session(engine):
    Session = sessionmaker(bind=engine)
    session = Session()
    Base.metadata.create_all(engine)
    yield session
    session.close()


@pytest.fixture(scope="module")
def setup_data(session):
    delta_run = Run(
        command="delta",
        family="exp_weighted",
        p=4.0,
        eps=0.1,
        toolkit_version="0.1.0",
        config_json="{}",
    )
    experiment = Run(
        command="transitivity",
        family="exp_weighted",
        p=4.0,
        eps=0.2,
        seed=7,
        toolkit_version="0.1.0",
        config_json="{}",
    )
    session.add_all([delta_run, experiment])
    session.commit()

    session.add_all(
        [
            Constant(run_id=delta_run.id, name="certified.delta", value_text="1.0e-400", log10=-400.0),
            Constant(run_id=delta_run.id, name="certified.K", value_text="19.0", value_float=19.0),
            Constant(run_id=experiment.id, name="eps", value_text="0.2", value_float=0.2),
            Trial(run_id=experiment.id, trial=0, defect=0.0),
            Trial(run_id=experiment.id, trial=1, defect=None, failure="Images 0 and 1 collide"),
        ]
    )
    session.commit()
    return delta_run, experiment


def test_get_runs(session, setup_data):
    delta_run, experiment = setup_data
    assert [r.id for r in get_runs(session)] == [delta_run.id, experiment.id]
    assert get_runs(session, command="transitivity")[0].seed == 7
    assert get_runs(session, id=experiment.id)[0].command == "transitivity"
    assert get_runs(session, id=999) == []
    assert len(get_runs(session, n=1)) == 1
    assert get_runs(session)[0].mode == "certified"


def test_get_constants(session, setup_data):
    delta_run, _ = setup_data
    constant, command = get_constants(session, name="certified.delta")[0]
    assert command == "delta"
    assert constant.value_float is None
    assert constant.log10 == -400.0
    assert len(get_constants(session, run_id=delta_run.id)) == 2


def test_get_trials(session, setup_data):
    _, experiment = setup_data
    assert len(get_trials(session, run_id=experiment.id)) == 2
    failed = get_trials(session, failed_only=True)
    assert [t.trial for t in failed] == [1]
    assert failed[0].run.command == "transitivity"
