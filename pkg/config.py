# config.py
import os

# =========================================================
# 1. DIRETÓRIOS E AMBIENTE
# =========================================================
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Diretório raiz para arquivos gerados pela app (pode ser trocado por env)
STORAGE_DIR = os.environ.get("GROUPREC_STORAGE_DIR", os.path.join(BASE_DIR, "storage"))

# Onde ficam os CSVs produzidos por simulate / exact / reproduce / compare
RESULTS_STORAGE_DIR = os.path.join(STORAGE_DIR, "results")


# =========================================================
# 2. PADRÕES DA SIMULAÇÃO
# =========================================================
# Rodadas padrão (o artigo usa 10^9; 10^6 já deixa o erro padrão bem abaixo das tolerâncias)
DEFAULT_ROUNDS = 1_000_000

# Semente padrão dos presets
DEFAULT_SEED = 20240601

# Métricas I_i reportadas quando o cenário não especifica (cortadas em N)
DEFAULT_METRICS_I = (1, 5, 10, 30)

# Punição padrão do punish-low (η)
DEFAULT_PUNISH_ETA = "1/2"

# Nota "honesta" abaixo deste limite vira m no bias-scoring; o resto vira 1
BIAS_LOW_THRESHOLD = 3

# Pontos de Q usados na checagem de viabilidade do ajuste (α, β)
FEASIBILITY_Q_POINTS = 400


# =========================================================
# 3. SOLVER EXATO
# =========================================================
# Maior N aceito pelo solver exato (custo Θ(2^N))
EXACT_SIZE_GUARD = int(os.environ.get("GROUPREC_EXACT_SIZE_GUARD", "12"))

# Orçamento de passos elementares do oráculo de força bruta
ORACLE_STEP_BUDGET = 10 ** 8


# =========================================================
# 4. EXECUÇÃO DO MOTOR MONTE CARLO
# =========================================================
# 0 = decide pelo psutil (núcleos físicos)
MC_WORKERS = int(os.environ.get("GROUPREC_WORKERS", "0"))

# Fração da RAM disponível que os blocos vetorizados podem ocupar
MC_MEMORY_FRACTION = 0.25

# Limites de rodadas por bloco (não altera resultados, só memória/velocidade)
MC_MIN_BLOCK_ROUNDS = 16
MC_MAX_BLOCK_ROUNDS = 4096

# Intervalo mínimo entre linhas de progresso no stderr (segundos)
PROGRESS_MIN_INTERVAL = 1.0


# =========================================================
# 5. LOGS
# =========================================================
LOG_ENABLED = os.environ.get("GROUPREC_LOG_ENABLED", "0") == "1"  # False = desativa totalmente os logs
LOG_ENVIRONMENT = os.environ.get("GROUPREC_ENV", "local")
LOG_EXTERNAL_ENABLED = os.environ.get("GROUPREC_LOG_EXTERNAL", "0") == "1"  # envia logs para endpoint externo
LOG_EXTERNAL_URL = os.environ.get("GROUPREC_LOG_URL", "http://meu-servico-de-logs/api/events")
