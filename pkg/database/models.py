"""
Database models for the run catalogue
One row per CLI run and one per reported quadrisecant
"""
from datetime import datetime
from sqlalchemy import Column, Integer, String, DateTime, Text, Float, ForeignKey
from sqlalchemy.orm import declarative_base, relationship

Base = declarative_base()


class RunRecord(Base):
    """One CLI invocation"""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    subcommand = Column(String(32), nullable=False)
    manifest = Column(Text, nullable=False)  # RunConfig.to_manifest()
    seed = Column(Integer, default=0)
    workers = Column(Integer, default=1)
    exit_code = Column(Integer, default=0)
    result_count = Column(Integer, default=0)  # quadrisecants, arcs, families or roots
    output_dir = Column(String(500), nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    # Relationships
    quadrisecants = relationship("QuadrisecantRecord", back_populates="run",
                                 cascade="all, delete-orphan")

    def __repr__(self):
        return f"<RunRecord(id={self.id}, subcommand='{self.subcommand}', exit={self.exit_code})>"


class QuadrisecantRecord(Base):
    """A quadrisecant reported by a run"""
    __tablename__ = "quadrisecants"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id", ondelete="CASCADE"), nullable=False)
    position = Column(Integer, nullable=False)  # index in the sorted report
    pattern = Column(String(64), nullable=False)
    hits = Column(Text, nullable=False)  # "c:e:t" per hit, space separated
    containment = Column(String(8), default="000")
    near_degenerate = Column(Integer, default=0)  # SQLite has no boolean
    residual = Column(Float, default=0.0)

    run = relationship("RunRecord", back_populates="quadrisecants")

    def __repr__(self):
        return f"<QuadrisecantRecord(run={self.run_id}, pattern='{self.pattern}')>"
