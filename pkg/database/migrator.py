import sys
from pathlib import Path

from sqlalchemy import inspect, text
from sqlalchemy.engine import Engine

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.utils import get_logger

logger = get_logger("catalog", "catalog.log")


def _default_sql(column) -> str:
    if column.default is None:
        return ""
    arg = column.default.arg
    # Only simple scalar defaults are safe to migrate
    if isinstance(arg, bool):
        return f"DEFAULT {1 if arg else 0}"
    if isinstance(arg, str):
        return f"DEFAULT '{arg}'"
    if isinstance(arg, (int, float)):
        return f"DEFAULT {arg}"
    return ""


def update_schema(engine: Engine, base_model) -> list:
    """
    Add catalogue columns missing from an older SQLite file.
    Does NOT support column removal or type changes due to SQLite limitations.

    Returns:
        Names of the added columns as "table.column"
    """
    inspector = inspect(engine)
    existing_tables = inspector.get_table_names()
    added = []
    with engine.begin() as conn:
        for table_name, table_obj in base_model.metadata.tables.items():
            if table_name not in existing_tables:
                continue  # create_all handles new tables
            existing_columns = {col["name"] for col in inspector.get_columns(table_name)}
            for column in table_obj.columns:
                if column.name in existing_columns:
                    continue
                col_type = column.type.compile(engine.dialect)
                # NOT NULL on an added column needs a DEFAULT, so the column stays nullable
                sql = f"ALTER TABLE {table_name} ADD COLUMN {column.name} {col_type} {_default_sql(column)}".rstrip()
                try:
                    conn.execute(text(sql))
                    added.append(f"{table_name}.{column.name}")
                    logger.info(f"[MIGRATE] added {table_name}.{column.name} ({col_type})")
                except Exception as e:
                    logger.error(f"[MIGRATE] adding {column.name} to {table_name} failed: {e}")
    return added
