# app/services/__init__.py
#
# Módulos importados diretamente (from app.services import mc_engine, ...):
#   quality_model, score_model, decision_rules   → modelo e regras
#   exact_solver                                 → caso especial exato
#   review_rounds, mc_engine, strategies         → motor Monte Carlo
#   scenario_loader, report_csv, presets         → entrada/saída
#   progress, resources, storage                 → infraestrutura
