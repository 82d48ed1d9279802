"""
Run catalogue
SQLite store of CLI runs and their quadrisecants
"""
import sys
from pathlib import Path
from typing import List, Optional, Sequence

sys.path.insert(0, str(Path(__file__).parent.parent))

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session as DBSession
from database.models import Base, RunRecord, QuadrisecantRecord
from database.migrator import update_schema
from core.utils import format_float, get_logger

logger = get_logger("catalog", "catalog.log")


def _hit_text(q) -> str:
    return " ".join(f"{h.point.component}:{h.point.edge}:{format_float(float(h.point.t))}"
                    for h in q.transversal.hits)


class Catalog:
    """SQLite catalogue manager"""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.engine = create_engine(f"sqlite:///{self.path}", echo=False)
        Base.metadata.create_all(self.engine)
        # Auto-migrate: older files gain new columns
        try:
            update_schema(self.engine, Base)
        except Exception as e:
            print(f"[WARN] Auto-migration failed: {e}")
        self.SessionLocal = sessionmaker(bind=self.engine, expire_on_commit=False)

    def get_session(self) -> DBSession:
        return self.SessionLocal()

    def close(self):
        self.engine.dispose()

    # ============ Runs ============

    def record_run(self, config, exit_code: int, result_count: int = 0,
                   quadrisecants: Sequence = ()) -> int:
        """Store one run with its manifest and quadrisecant rows; returns the run id"""
        with self.get_session() as session:
            run = RunRecord(
                subcommand=config.subcommand,
                manifest=config.to_manifest(),
                seed=config.seed,
                workers=config.workers,
                exit_code=exit_code,
                result_count=result_count,
                output_dir=config.output_dir,
            )
            for pos, q in enumerate(quadrisecants):
                run.quadrisecants.append(QuadrisecantRecord(
                    position=pos,
                    pattern=q.pattern,
                    hits=_hit_text(q),
                    containment="".join("1" if c else "0" for c in q.containment),
                    near_degenerate=int(q.near_degenerate),
                    residual=q.residual,
                ))
            session.add(run)
            session.commit()
            run_id = run.id
        logger.info(f"catalogued run {run_id}: {config.subcommand}, exit {exit_code}, "
                    f"{len(quadrisecants)} quadrisecant rows")
        return run_id

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        with self.get_session() as session:
            return session.get(RunRecord, run_id)

    def list_runs(self, subcommand: Optional[str] = None) -> List[RunRecord]:
        with self.get_session() as session:
            query = session.query(RunRecord)
            if subcommand:
                query = query.filter(RunRecord.subcommand == subcommand)
            return query.order_by(RunRecord.id).all()

    def get_quadrisecants(self, run_id: int) -> List[QuadrisecantRecord]:
        with self.get_session() as session:
            return (session.query(QuadrisecantRecord)
                    .filter(QuadrisecantRecord.run_id == run_id)
                    .order_by(QuadrisecantRecord.position).all())

    def pattern_counts(self, run_id: int) -> dict:
        counts = {}
        for row in self.get_quadrisecants(run_id):
            counts[row.pattern] = counts.get(row.pattern, 0) + 1
        return counts
