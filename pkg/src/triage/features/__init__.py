"""Featurization: vocabulary, BOW, TF-IDF, LSI and word/document embeddings."""

from triage.features.embeddings import (
    DocEmbeddings,
    WordEmbeddings,
    cosine,
    doc_vector_avg,
    infer_vector,
    neg_sampling_loss_grad,
    pvdm_loss_grad,
    train_doc2vec,
    train_word2vec,
)
from triage.features.lsi import LsiModel, lsi_fit, lsi_project, lsi_project_many, truncation_error
from triage.features.text import (
    IdfWeights,
    SparseVector,
    Vocabulary,
    bow,
    build_vocab,
    term_document_matrix,
    tfidf_fit,
    tfidf_transform,
)

__all__ = [
    "DocEmbeddings",
    "IdfWeights",
    "LsiModel",
    "SparseVector",
    "Vocabulary",
    "WordEmbeddings",
    "bow",
    "build_vocab",
    "cosine",
    "doc_vector_avg",
    "infer_vector",
    "lsi_fit",
    "lsi_project",
    "lsi_project_many",
    "neg_sampling_loss_grad",
    "pvdm_loss_grad",
    "term_document_matrix",
    "tfidf_fit",
    "tfidf_transform",
    "train_doc2vec",
    "train_word2vec",
    "truncation_error",
]
