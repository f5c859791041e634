import json
import math
import os
import tempfile
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel


class ResultFileProcessor:
    """Class to write experiment results (CSV curves and JSON reports)."""

    OUTPUT_DIR = 'results'

    @classmethod
    def initialize_output_directory(cls, output_dir: Optional[str] = None) -> str:
        """
        Create the output directory if needed. Existing results are kept.

        Args:
            output_dir (Optional[str]): Directory to use instead of OUTPUT_DIR.

        Returns:
            str: Absolute path of the output directory.
        """
        if output_dir:
            cls.OUTPUT_DIR = output_dir
        os.makedirs(cls.OUTPUT_DIR, exist_ok=True)
        print(f'📁 Diretório {cls.OUTPUT_DIR} criado/inicializado')
        return os.path.abspath(cls.OUTPUT_DIR)

    @classmethod
    def to_jsonable(cls, value: Any) -> Any:
        """
        Convert numpy values, models and non-finite floats into JSON-safe values.

        Infinite values become the strings 'inf' / '-inf' and NaN becomes None.

        Args:
            value (Any): Value to convert.

        Returns:
            Any: Structure made of dicts, lists, strings, numbers and None.
        """
        if isinstance(value, BaseModel):
            return cls.to_jsonable(value.model_dump(mode='python', by_alias=True))
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, dict):
            return {str(k): cls.to_jsonable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [cls.to_jsonable(v) for v in value]
        if isinstance(value, np.ndarray):
            return [cls.to_jsonable(v) for v in value.tolist()]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, Fraction):
            return str(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isnan(value):
                return None
            if math.isinf(value):
                return 'inf' if value > 0 else '-inf'
            return value
        return value

    @classmethod
    def _atomic_write(cls, filename: str, content: str) -> str:
        os.makedirs(cls.OUTPUT_DIR, exist_ok=True)
        file_path = os.path.join(cls.OUTPUT_DIR, os.path.basename(filename))
        fd, temp_path = tempfile.mkstemp(dir=cls.OUTPUT_DIR, suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
                f.write(content)
            os.replace(temp_path, file_path)
        except Exception:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        return file_path

    @classmethod
    def write_csv(cls, df: pd.DataFrame, filename: str, columns: Optional[List[str]] = None) -> str:
        """
        Write a DataFrame as CSV with a fixed column order and full float precision.

        Args:
            df (pd.DataFrame): Table to write.
            filename (str): File name inside the output directory.
            columns (Optional[List[str]]): Column order; defaults to df's.

        Returns:
            str: Path of the written file.
        """
        if columns is not None:
            df = df[columns]
        content = df.to_csv(index=False, float_format='%.17g', lineterminator='\n')
        file_path = cls._atomic_write(filename, content)
        print(f'💾 Arquivo {os.path.basename(file_path)} salvo ({len(df)} linhas)')
        return file_path

    @classmethod
    def write_json(cls, payload: Dict[str, Any], filename: str) -> str:
        """
        Write a report as JSON with sorted keys.

        Args:
            payload (Dict[str, Any]): Report to write.
            filename (str): File name inside the output directory.

        Returns:
            str: Path of the written file.
        """
        content = json.dumps(cls.to_jsonable(payload), sort_keys=True, indent=2) + '\n'
        file_path = cls._atomic_write(filename, content)
        print(f'💾 Arquivo {os.path.basename(file_path)} salvo')
        return file_path
