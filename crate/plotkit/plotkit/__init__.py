from .schema import CSV_COLUMNS, SchemaMismatch, read_results

__all__ = ["CSV_COLUMNS", "SchemaMismatch", "read_results"]
