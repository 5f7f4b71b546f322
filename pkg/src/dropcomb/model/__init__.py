"""Transformer emission network."""
from .attention import MultiHeadAttention, multi_head_attention
from .embeddings import EmbeddingTables
from .emitter import AttentionExport, EmissionHead, EmissionTable, TransformerEmitter
from .transformer import Decoder, DecoderBlock, Encoder, EncoderBlock, FeedForward

__all__ = [
    'AttentionExport', 'Decoder', 'DecoderBlock', 'EmbeddingTables', 'EmissionHead',
    'EmissionTable', 'Encoder', 'EncoderBlock', 'FeedForward', 'MultiHeadAttention',
    'TransformerEmitter', 'multi_head_attention',
]
