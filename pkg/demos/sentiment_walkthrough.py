"""Annotating tweets with a lexicon and labelling cascades.

Each tweet gets an emotion sign from its strongest positive and negative
lexicon matches, plus counts of social and cognitive words. A cascade is then
positive, negative, bipolar or neutral depending on whether its share of
positive and negative tweets beats the corpus-wide shares.
"""
from cascata import (CategoryLexicon, SentimentLexicon, classify_cascades, corpus_means, detect_cascades)
from cascata.classify import label_summary
from cascata.lexicon import annotate_corpus, annotate_text
from cascata.synth import SynthConfig, gen_corpus, gen_graph, synth_lexicons

slex = SentimentLexicon({"feliz": 3, "alegr*": 2, "triste": -2, "odi*": -4})
clex = CategoryLexicon(social=["amig*", "famili*"], cognitive=["pens*", "cre*"])
for text in ("¡Qué feliz estoy con mis amigos!", "Creo que odio los lunes, pero estoy alegre",
             "Pensar no es fácil para mi familia"):
    a = annotate_text(text, slex, clex)
    print(f"{text!r:48} e={a.e:+d} social={a.soc} cognitive={a.cog} words={a.w}")

# Synthetic texts are built from a tiny vocabulary that its own lexicons read back exactly.
cfg = SynthConfig(n_users=1500, edge_prob=0.0006, n_windows=30, window_width=3600, tweet_rate=0.03,
                  reply_prob=0.2, with_text=True, seed=4)
g = gen_graph(cfg)
corpus = annotate_corpus(gen_corpus(cfg, g).corpus, *synth_lexicons(), keep_existing=False)
means = corpus_means(corpus)
print(f"\ncorpus means: positive {means.mu_p:.3f}, negative {means.mu_n:.3f}, "
      f"social {means.mu_soc:.3f}, cognitive {means.mu_cog:.3f}")

cascades = detect_cascades(corpus, g)
labels = classify_cascades(cascades, corpus.annotations(), means)
for label, count, share in label_summary(lab.sentiment for lab in labels.values()):
    print(f"{label:>9}: {count:5d} cascades ({share})")
