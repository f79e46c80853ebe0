"""SHACL-driven RDF curation with snapshot provenance and change tracking."""

__version__ = "0.1.0"
