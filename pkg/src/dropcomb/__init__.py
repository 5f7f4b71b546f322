"""DropComb - dropped pronoun recovery with a transformer emitter and a comb-structured CRF."""

__version__ = "0.1.0"
