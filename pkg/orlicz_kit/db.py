import os
from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import Session, sessionmaker

from orlicz_kit.models import Base


def get_orlicz_kit_db_url() -> str:
    """Return the database URL from ``ORLICZ_KIT_DB_URL`` or fallback to in-memory."""
    return os.environ.get("ORLICZ_KIT_DB_URL", "sqlite:///:memory:")


def get_output_dir() -> str:
    """Return the report directory from ``ORLICZ_KIT_OUTPUT_DIR`` or the current directory."""
    return os.environ.get("ORLICZ_KIT_OUTPUT_DIR", ".")


def create_database(database_url: Optional[str] = None):
    """
    Create the results tables that don't exist using the provided database URL.

    Parameters:
    database_url (str): The database URL.
    """
    if database_url is None:
        database_url = get_orlicz_kit_db_url()
    engine = create_engine(database_url)
    Base.metadata.create_all(engine, checkfirst=True)


def get_session(database_url: Optional[str] = None) -> Session:
    """
    Get a session to the database using the provided database URL.

    Parameters:
    database_url (str): The database URL.

    Returns:
    session: The session to the database.
    """
    if database_url is None:
        database_url = get_orlicz_kit_db_url()
    engine = create_engine(database_url)
    Session = sessionmaker(bind=engine)
    return Session()
