# utils/rng.py
"""
Fluxos aleatórios baseados em contador (Philox 4x64).

Cada rodada consome um número fixo de uniformes `draws_per_round` (múltiplo de 4).
A rodada r ocupa o bloco de contadores [r·S/4, (r+1)·S/4), então o valor de uma
rodada depende só de (semente, r) e não de como as rodadas foram divididas entre
blocos ou workers.
"""
import numpy as np

# 53 bits de mantissa → uniforme em [0, 1)
_TWO_POW_M53 = 1.0 / 9007199254740992.0
# meio passo da grade de 2^-53: leva [0, 1) para o intervalo aberto (0, 1)
HALF_ULP = 0.5 * _TWO_POW_M53


def _pad4(value: int) -> int:
    return (value + 3) // 4 * 4


def seed_key(seed: int) -> np.ndarray:
    """Chave de 128 bits derivada da semente (espalha sementes pequenas)."""
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def raw_to_uniform(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53


# maior double abaixo de 1
_ONE_BELOW = 1.0 - _TWO_POW_M53


def open_unit(u):
    """[0, 1) → (0, 1) sem inverter a ordem dos valores (o arredondamento pode empatar vizinhos)."""
    return np.minimum(u + HALF_ULP, _ONE_BELOW)


class RoundStreams:
    def __init__(self, seed: int, draws_per_round: int):
        self.seed = seed
        self.draws_per_round = _pad4(max(int(draws_per_round), 1))
        self._key = seed_key(seed)

    def uniforms(self, start_round: int, rounds: int) -> np.ndarray:
        """Matriz (rounds, draws_per_round) das rodadas [start_round, start_round + rounds)."""
        counter = start_round * (self.draws_per_round // 4)
        bitgen = np.random.Philox(counter=counter, key=self._key)
        raw = bitgen.random_raw(rounds * self.draws_per_round)
        return raw_to_uniform(raw).reshape(rounds, self.draws_per_round)


def make_generator(seed: int) -> np.random.Generator:
    """Gerador sequencial para as APIs escalares (mesma família de bits)."""
    return np.random.Generator(np.random.Philox(key=seed_key(seed)))
