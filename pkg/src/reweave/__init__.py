"""reweave: corpus-driven data-to-text generation.

Learns word-level fragment/feature alignments from a parallel corpus of
texts and attribute=value collections, distills schemata plus per-placeholder
fragment inventories from them, and generates new texts by reassembling those
fragments under least-squares selection weights. All learned artifacts live
in plain JSON files meant to be read and edited by hand.
"""

__version__ = "0.1.0"
