# services/scenario_loader.py
"""
Leitura e escrita dos arquivos de cenário (JSON).

Formato:
    {
      "n_papers": 200, "k": 30, "m": 5,
      "review_policy": {"kind": "homogeneous", "n": 3},
      "regime": "medium",
      "voting": "average",                  # ou {"rule": "punish-low", "eta": "1/2"}
      "tiebreak": "least-variance",
      "seed": 20240601,
      ...opcionais (sigma_policy, matching_model, behavior_mix, metrics_i, ...)
      "run": {"rounds": 1000000, "guarantee": {...}, "out": "x.csv", "workers": 4}
    }
Chaves desconhecidas são rejeitadas; a semente é obrigatória.
"""
import json
from enum import Enum
from fractions import Fraction
from typing import Optional

from app.models import (
    Behavior,
    BoundKind,
    CriticalMap,
    GuaranteeSpec,
    MatchingKind,
    MatchingModel,
    ParseError,
    PlanKind,
    QualitySource,
    RegimeKind,
    ReviewPlan,
    RunParams,
    ScenarioConfig,
    SelectivityRegime,
    SigmaKind,
    SigmaPolicy,
    TieBreakRule,
    VotingKind,
    VotingRule,
)
from app.utils.structured_logging import log_event

SCENARIO_KEYS = {
    "n_papers", "k", "m", "review_policy", "regime", "quality_source", "quality_variance",
    "voting", "tiebreak", "sigma_policy", "matching_model", "behavior_mix", "metrics_i",
    "seed", "review_capacity", "bias_threshold", "run",
}
REQUIRED_KEYS = ("n_papers", "k", "m", "review_policy", "regime", "voting", "tiebreak", "seed")


# ---------------------------------------------------
# Conversores de campo
# ---------------------------------------------------
def _section(data, allowed: set, path: str) -> dict:
    if not isinstance(data, dict):
        raise ParseError("esperado um objeto JSON", field=path)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ParseError(f"chave desconhecida: {unknown[0]}", field=f"{path}.{unknown[0]}" if path else unknown[0])
    return data


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"esperado inteiro, recebeu {value!r}", field=path)
    return value


def _float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"esperado número, recebeu {value!r}", field=path)
    return float(value)


def _enum(cls: type[Enum], value, path: str):
    try:
        return cls(value)
    except ValueError:
        options = ", ".join(e.value for e in cls)
        raise ParseError(f"valor {value!r} inválido (opções: {options})", field=path) from None


def _optional(data: dict, key: str, conv, path: str):
    if data.get(key) is None:
        return None
    return conv(data[key], f"{path}{key}")


def _plan(data, path: str = "review_policy") -> ReviewPlan:
    data = _section(data, {"kind", "n"}, path)
    if "n" not in data:
        raise ParseError("campo obrigatório ausente", field=f"{path}.n")
    kind = _enum(PlanKind, data.get("kind", PlanKind.HOMOGENEOUS.value), f"{path}.kind")
    return ReviewPlan(kind, _int(data["n"], f"{path}.n"))


def _voting(data, path: str = "voting") -> VotingRule:
    if isinstance(data, str):
        return VotingRule(_enum(VotingKind, data, path))
    data = _section(data, {"rule", "eta"}, path)
    kind = _enum(VotingKind, data.get("rule"), f"{path}.rule")
    if "eta" not in data:
        return VotingRule(kind)
    try:
        eta = Fraction(str(data["eta"]))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"η inválido: {data['eta']!r}", field=f"{path}.eta") from None
    return VotingRule(kind, eta=eta)


def _sigma(data, path: str = "sigma_policy") -> SigmaPolicy:
    data = _section(data, {"kind", "sigma", "sigma_match", "sigma_mismatch", "a", "b"}, path)
    kind = _enum(SigmaKind, data.get("kind", SigmaKind.CONSTANT.value), f"{path}.kind")
    params = {key: _float(value, f"{path}.{key}") for key, value in data.items() if key != "kind"}
    return SigmaPolicy(kind, **params)


def _matching(data, path: str = "matching_model") -> MatchingModel:
    data = _section(data, {"kind", "critical", "fraction", "levels", "critical_map"}, path)
    kind = _enum(MatchingKind, data.get("kind", MatchingKind.NONE.value), f"{path}.kind")
    params = {}
    if "critical" in data:
        params["critical"] = _float(data["critical"], f"{path}.critical")
    if "fraction" in data:
        params["fraction"] = _float(data["fraction"], f"{path}.fraction")
    if "levels" in data:
        params["levels"] = _int(data["levels"], f"{path}.levels")
    if "critical_map" in data:
        params["critical_map"] = _enum(CriticalMap, data["critical_map"], f"{path}.critical_map")
    return MatchingModel(kind, **params)


def _behavior_mix(data, path: str = "behavior_mix") -> dict:
    if not isinstance(data, dict):
        raise ParseError("esperado um objeto JSON", field=path)
    return {_enum(Behavior, key, f"{path}.{key}"): _float(value, f"{path}.{key}") for key, value in data.items()}


def _guarantee(data, k: int, path: str = "run.guarantee") -> GuaranteeSpec:
    data = _section(data, {"epsilon", "delta", "bound", "p_floor"}, path)
    for key in ("epsilon", "delta"):
        if key not in data:
            raise ParseError("campo obrigatório ausente", field=f"{path}.{key}")
    return GuaranteeSpec(
        epsilon=_float(data["epsilon"], f"{path}.epsilon"),
        delta=_float(data["delta"], f"{path}.delta"),
        bound=_enum(BoundKind, data.get("bound", BoundKind.TIGHT.value), f"{path}.bound"),
        k=k,
        p_floor=_optional(data, "p_floor", _float, f"{path}."),
    )


def _run_params(data, k: int) -> RunParams:
    data = _section(data, {"rounds", "guarantee", "out", "workers"}, "run")
    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ParseError("esperado texto", field="run.out")
    return RunParams(
        rounds=_optional(data, "rounds", _int, "run."),
        guarantee=_guarantee(data["guarantee"], k) if data.get("guarantee") is not None else None,
        out=out,
        workers=_optional(data, "workers", _int, "run."),
    )


# ---------------------------------------------------
# API
# ---------------------------------------------------
def parse_scenario(data) -> tuple:
    data = _section(data, SCENARIO_KEYS, "")
    for key in REQUIRED_KEYS:
        if key not in data:
            raise ParseError("campo obrigatório ausente", field=key)

    m = _int(data["m"], "m")
    k = _int(data["k"], "k")
    metrics = data.get("metrics_i")
    if metrics is not None and not isinstance(metrics, list):
        raise ParseError("esperada uma lista de inteiros", field="metrics_i")

    config = ScenarioConfig(
        n_papers=_int(data["n_papers"], "n_papers"),
        k=k,
        m=m,
        review_policy=_plan(data["review_policy"]),
        regime=SelectivityRegime(_enum(RegimeKind, data["regime"], "regime"), m),
        voting=_voting(data["voting"]),
        tiebreak=_enum(TieBreakRule, data["tiebreak"], "tiebreak"),
        seed=_int(data["seed"], "seed"),
        sigma_policy=_sigma(data["sigma_policy"]) if "sigma_policy" in data else SigmaPolicy(SigmaKind.CONSTANT),
        matching_model=_matching(data["matching_model"]) if "matching_model" in data else MatchingModel(MatchingKind.NONE),
        behavior_mix=_behavior_mix(data.get("behavior_mix", {})),
        metrics_i=tuple(_int(i, "metrics_i") for i in metrics) if metrics is not None else None,
        quality_source=_enum(QualitySource, data.get("quality_source", QualitySource.REGIME.value), "quality_source"),
        quality_variance=_optional(data, "quality_variance", _float, ""),
        review_capacity=_optional(data, "review_capacity", _int, ""),
        bias_threshold=_int(data.get("bias_threshold", 3), "bias_threshold"),
    )
    params = _run_params(data.get("run") or {}, k)
    return config, params


def load_scenario(path: str) -> tuple:
    """(ScenarioConfig, RunParams) validados a partir de um arquivo JSON."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"não foi possível ler {path}: {e.strerror}") from None

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno) from None

    config, params = parse_scenario(data)
    log_event("scenario.loaded", path=path, digest=config.digest()[:16], n_papers=config.n_papers,
              k=config.k, plan=config.review_policy.to_dict())
    return config, params


def dump_scenario(config: ScenarioConfig, params: Optional[RunParams] = None) -> str:
    data = config.to_dict()
    run = params.to_dict() if params is not None else {}
    if run:
        data["run"] = run
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
