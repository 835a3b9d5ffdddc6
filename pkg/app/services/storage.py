# services/storage.py
import os
import tempfile
import time

import config as app_config


class StorageService:
    """
    Diretórios locais do simulador (storage/, storage/results, storage/logs).

    Caminhos vêm de GROUPREC_STORAGE_DIR / GROUPREC_RESULTS_DIR quando
    definidos, senão de config.py. CSVs são gravados de forma atômica para
    que uma execução interrompida nunca deixe um resultado pela metade.
    """

    @staticmethod
    def _env_path(key: str, default: str) -> str:
        value = os.environ.get(f"GROUPREC_{key}")
        return value if value else default

    # ---------------------------------------------------------
    # Diretórios
    # ---------------------------------------------------------
    @classmethod
    def storage_dir(cls, ensure: bool = True) -> str:
        path = cls._env_path("STORAGE_DIR", app_config.STORAGE_DIR)
        return cls.ensure_dir(path) if ensure else path

    @classmethod
    def results_dir(cls, ensure: bool = True) -> str:
        path = cls._env_path("RESULTS_DIR", os.path.join(cls.storage_dir(False), "results"))
        return cls.ensure_dir(path) if ensure else path

    @classmethod
    def logs_dir(cls, ensure: bool = True) -> str:
        path = os.path.join(cls.storage_dir(False), "logs")
        return cls.ensure_dir(path) if ensure else path

    @classmethod
    def results_path_for(cls, filename: str, ensure: bool = True) -> str:
        return os.path.join(cls.results_dir(ensure=ensure), filename)

    # ---------------------------------------------------------
    # Escrita
    # ---------------------------------------------------------
    @staticmethod
    def prepare_long_path(path: str) -> str:
        """Prefixo \\?\\ no Windows (caminhos > 260 caracteres)."""
        if os.name == "nt":
            path = os.path.abspath(path)
            if not path.startswith("\\\\?\\"):
                return "\\\\?\\" + path
        return path

    @classmethod
    def ensure_dir(cls, path: str) -> str:
        if not path:
            raise ValueError("Caminho de diretório vazio.")
        long_path = cls.prepare_long_path(path)
        for attempt in range(3):
            try:
                os.makedirs(long_path, exist_ok=True)
                break
            except OSError:
                # outro processo criando a mesma árvore
                if os.path.isdir(long_path) or attempt == 2:
                    break
                time.sleep(0.05)
        if not os.path.isdir(long_path):
            raise OSError(f"não foi possível criar o diretório {path}")
        return path

    @classmethod
    def ensure_parent_dir(cls, file_path: str) -> None:
        directory = os.path.dirname(file_path)
        if directory:
            cls.ensure_dir(directory)

    @classmethod
    def write_text_atomic(cls, path: str, text: str) -> str:
        """Grava em arquivo temporário no mesmo diretório e troca com os.replace."""
        cls.ensure_parent_dir(path)
        target = cls.prepare_long_path(path)
        fd, tmp = tempfile.mkstemp(prefix=".partial-", suffix=".csv", dir=os.path.dirname(target) or ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise
        return path
