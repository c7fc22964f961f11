"""Bundled English stopword list (~300 high-frequency function words)."""

STOPWORDS = frozenset("""
a about above across after afterwards again against all almost alone along
already also although always am among amongst an and another any anybody
anyhow anyone anything anyway anywhere are around as at back be became
because become becomes becoming been before beforehand behind being below
beside besides between beyond both but by can cannot could did do does
doing done down during each eight either eleven else elsewhere enough etc
even ever every everybody everyone everything everywhere except few fifteen
fifty first five for former formerly forty four from further had has have
having he hence her here hereafter hereby herein hereupon hers herself him
himself his how however hundred i if in indeed instead into is it its
itself just keep last latter latterly least less many may me meanwhile
might mine more moreover most mostly much must my myself namely neither
never nevertheless next nine ninety no nobody none nonetheless noone nor
not nothing now nowhere of off often on once one only onto or other others
otherwise our ours ourselves out over own per perhaps please put quite
rather re really regarding same say said says see seem seemed seeming seems
several she should since six sixty so some somebody somehow someone
something sometime sometimes somewhere still such ten than that the their
theirs them themselves then thence there thereafter thereby therefore
therein thereupon these they third this those though three through
throughout thru thus to together too toward towards twelve twenty two under
unless until up upon us used using various very via was we well were what
whatever when whence whenever where whereafter whereas whereby wherein
whereupon wherever whether which while whither who whoever whole whom whose
why will with within without would yet you your yours yourself yourselves
""".split())
