from sqlalchemy import Column, Float, ForeignKey, Integer, Text, UniqueConstraint
from sqlalchemy.orm import declarative_base, relationship

Base = declarative_base()


class Run(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(Text, nullable=False)
    family = Column(Text, nullable=False)
    p = Column(Float, nullable=False)
    eps = Column(Float, nullable=True)
    seed = Column(Integer, nullable=True)
    mode = Column(Text, nullable=False, default="certified")
    toolkit_version = Column(Text, nullable=False)
    config_json = Column(Text, nullable=False)

    constants = relationship("Constant", back_populates="run")
    trials = relationship("Trial", back_populates="run")


class Constant(Base):
    __tablename__ = "constants"
    __table_args__ = (
        UniqueConstraint("run_id", "name", name="uq_constants_run_id_name"),
    )

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False)
    name = Column(Text, nullable=False)
    # exact decimal text; value_float is NULL when out of double range
    value_text = Column(Text, nullable=False)
    value_float = Column(Float, nullable=True)
    log10 = Column(Float, nullable=True)
    provenance = Column(Text, nullable=True)

    run = relationship("Run", back_populates="constants")


class Trial(Base):
    __tablename__ = "trials"
    __table_args__ = (UniqueConstraint("run_id", "trial", name="uq_trials_run_id_trial"),)

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False)
    trial = Column(Integer, nullable=False)
    delta_achieved = Column(Float, nullable=True)
    defect = Column(Float, nullable=True)
    failure = Column(Text, nullable=True)

    run = relationship("Run", back_populates="trials")
