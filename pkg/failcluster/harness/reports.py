"""CSV tables and the TinyDB run manifest for experiment results."""

import logging
import os

from tinydb import Query, TinyDB

logger = logging.getLogger(__name__)

INTEGER_COLUMNS = ("k", "r", "votes", "count", "v_under", "v_equal", "v_over", "sum_vote")


def write_table(frame, path):
    """CSV with fixed float formatting so reruns are byte-identical."""
    frame = frame.copy()
    for column in INTEGER_COLUMNS:
        if column in frame.columns:
            frame[column] = frame[column].astype("Int64")
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def table_path(out_dir, experiment, table):
    return os.path.join(out_dir, f"{experiment}_{table}.csv")


def save_manifest(out_dir, document):
    """Upsert one manifest document per experiment name."""
    db = TinyDB(os.path.join(out_dir, "manifest.json"), sort_keys=True, indent=2)
    try:
        Run = Query()
        db.upsert(document, Run.experiment == document["experiment"])
    finally:
        db.close()


def write_experiment(result, cfg):
    os.makedirs(cfg.out_dir, exist_ok=True)
    paths = []
    for table, frame in result.tables.items():
        path = table_path(cfg.out_dir, result.name, table)
        write_table(frame, path)
        paths.append(path)
        logger.info("Wrote %s (%d rows)", path, len(frame))

    save_manifest(cfg.out_dir, {
        "experiment": result.name,
        "config": cfg.model_dump(mode="json"),
        "rows": {table: len(frame) for table, frame in result.tables.items()},
        "warnings": list(result.warnings),
    })
    return paths
