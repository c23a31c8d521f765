from typing import Optional

from sqlalchemy.orm import Session

from orlicz_kit.db import get_session
from orlicz_kit.models import Constant, Run, Trial


def get_runs(
    session: Optional[Session] = None,
    id: Optional[int] = None,
    command: Optional[str] = None,
    n: Optional[int] = None,
) -> list[Run]:
    """
    Get a list of Run objects from the database.

    Parameters:
    command (str): Only runs of this subcommand.
    n (int): The number of runs to return. If None, return all runs.

    Returns:
    List[Run]: A list of Run objects.
    """
    if session is None:
        session = get_session()
    if id:
        result = session.query(Run).filter(Run.id == id).first()
        return [result] if result else []
    query = session.query(Run)
    if command:
        query = query.filter(Run.command == command)
    return query.order_by(Run.id).limit(n).all()


def get_constants(
    session: Optional[Session] = None,
    run_id: Optional[int] = None,
    name: Optional[str] = None,
    n: Optional[int] = None,
) -> list[tuple[Constant, str]]:
    if session is None:
        session = get_session()
    query = session.query(Constant, Run.command).join(Run)
    if run_id:
        query = query.filter(Constant.run_id == run_id)
    if name:
        query = query.filter(Constant.name == name)
    return query.order_by(Constant.id).limit(n).all()


def get_trials(
    session: Optional[Session] = None,
    run_id: Optional[int] = None,
    failed_only: bool = False,
    n: Optional[int] = None,
) -> list[Trial]:
    if session is None:
        session = get_session()
    query = session.query(Trial)
    if run_id:
        query = query.filter(Trial.run_id == run_id)
    if failed_only:
        query = query.filter(Trial.failure.isnot(None))
    return query.order_by(Trial.run_id, Trial.trial).limit(n).all()
