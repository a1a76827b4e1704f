"""Closed-class word lists, irregular form tables, and prediction vocabularies.

English only. The open-class lists are deliberately small: they anchor the
rule tagger and give the builtin encoder part-of-speech-shaped candidate
pools; anything outside them falls back to the default noun analysis.
"""

DETERMINERS = frozenset(
    "the a an this these those some any each every no another both all".split()
)

PRONOUNS = frozenset(
    "he she it they we i you him her them us me who whom what something "
    "someone anything anyone nothing nobody everyone everything one".split()
)

POSSESSIVES = frozenset("his her its their my your our whose".split())

ADPOSITIONS = frozenset(
    "of in on at by with from near after before during against for under "
    "over through across between behind beside toward towards upon into "
    "onto above below around without within along past beyond up down off "
    "about as per".split()
)

COORDINATORS = frozenset("and or but nor".split())

SUBORDINATORS = frozenset("because although though if unless while when since until".split())

BE_FORMS = frozenset("be am is are was were been being".split())

HAVE_DO_FORMS = frozenset("have has had do does did".split())

MODALS = frozenset("will would can could shall should may might must".split())

NEGATIONS = frozenset(("not", "n't"))

IRREGULAR_VERBS = {
    "ate": "eat", "began": "begin", "bit": "bite", "bled": "bleed",
    "blew": "blow", "bought": "buy", "bred": "breed", "broke": "break",
    "brought": "bring", "built": "build", "burnt": "burn", "came": "come",
    "caught": "catch", "chose": "choose", "crept": "creep", "dealt": "deal",
    "drank": "drink", "drew": "draw", "drove": "drive", "dug": "dig",
    "fed": "feed", "fell": "fall", "felt": "feel", "fled": "flee",
    "flew": "fly", "forgot": "forget", "fought": "fight", "found": "find",
    "froze": "freeze", "gave": "give", "got": "get", "grew": "grow",
    "heard": "hear", "held": "hold", "hid": "hide", "hung": "hang",
    "kept": "keep", "knew": "know", "laid": "lay", "lay": "lie",
    "led": "lead", "leapt": "leap", "left": "leave", "lent": "lend",
    "lit": "light", "lost": "lose", "made": "make", "meant": "mean",
    "met": "meet", "paid": "pay", "ran": "run", "rang": "ring",
    "rode": "ride", "rose": "rise", "said": "say", "sang": "sing",
    "sank": "sink", "sat": "sit", "saw": "see", "sent": "send",
    "shook": "shake", "shot": "shoot", "slept": "sleep", "slid": "slide",
    "sold": "sell", "sought": "seek", "spent": "spend", "spoke": "speak",
    "sprang": "spring", "stole": "steal", "stood": "stand", "struck": "strike",
    "stung": "sting", "swam": "swim", "swept": "sweep", "swore": "swear",
    "taught": "teach", "thought": "think", "threw": "throw", "told": "tell",
    "took": "take", "tore": "tear", "understood": "understand", "went": "go",
    "wept": "weep", "woke": "wake", "won": "win", "wore": "wear",
    "wrote": "write",
}

IRREGULAR_PARTICIPLES = frozenset(
    "arisen beaten become been begun bitten blown broken brought built "
    "burnt bought caught chosen come dealt done drawn driven drunk eaten "
    "fallen fed felt fled flown forbidden forgotten fought found frozen "
    "given gone gotten grown heard held hidden hit hung hurt kept known "
    "laid led left lent lit lost made meant met paid put read ridden rung "
    "risen run said sat seen sent shaken shot shown shut slept slid sold "
    "sought spent spoken sprung stood stolen struck stung sung sunk swept "
    "sworn swum taken taught thought thrown told torn understood woken won "
    "worn woven written".split()
)

VERB_BASES = frozenset(
    """accept agree answer appear approve arrest arrive ask attack attempt
    awake bark be beat become beg begin believe bell belong bind bite bleed
    blow break breed bring build burn bury buy call care carry catch cause
    change chase choose climb close collect come consider contain continue
    cover creep cross cry cut dance deal decide declare deliver demand deny
    depart describe destroy detain devour die dig divide do drag draw dream
    drink drive drop eat end enjoy enter escape expect explain fall fear
    feed feel fetch fight fill find fine finish flee fling fly follow
    forbid forget forgive free freeze frighten gather get give gnaw go
    grant graze grow guard hang happen hate have hear help hide hit hold
    hope hunt hurry hurt invite join jump keep kill kiss know laugh lay
    lead leap learn leave lend let lie lift light like listen live look
    lose love make manage mark marry mean meet mend mind miss move need
    nibble notice obey observe obtain offer open order pass pay perceive
    pick place plan plant play please point prefer prepare pretend prevent
    promise propose protect prove pull punish push put quit raise reach
    read receive refuse release remain remember remove repeat reply report
    request rescue respect rest return reward ride ring rise roam roar run
    rush save say scare see seek seem seize select sell send serve set settle
    shake share shoot shout show shut sing sink sit sleep slide smell
    smile speak spend spin spot spring squeak stand start starve stay
    steal stick sting stop strike struggle study succeed suffer supply
    suppose swear sweep swim take talk teach tear tell tend thank think
    threaten throw tie touch travel treat tremble trust try turn
    understand use visit wait wake walk want warn wash watch wave wear
    weep whisper win wish wonder work worry write""".split()
)

IRREGULAR_NOUNS = {
    "mice": "mouse", "men": "man", "women": "woman", "children": "child",
    "feet": "foot", "teeth": "tooth", "geese": "goose", "oxen": "ox",
    "sheep": "sheep", "deer": "deer", "fish": "fish", "people": "people",
    "police": "police", "cattle": "cattle",
    "thieves": "thief", "wolves": "wolf", "leaves": "leaf", "lives": "life",
    "knives": "knife", "halves": "half", "calves": "calf", "loaves": "loaf",
    "shelves": "shelf", "hooves": "hoof",
}

ADJ_WORDS = frozenset(
    """angry bad big bitter brave bright busy clever cold cruel dangerous
    dark dead deep distant dry early empty faithful far fast fat fierce
    final fine foolish free fresh full gentle glad good great greedy green
    happy hard heavy high hollow hot hungry idle ill kind large late lazy
    little lonely long loud low mighty narrow near new old open poor proud
    quick quiet rich ripe rude sad safe severe sharp short shy sick silly
    slow small soft sore sour steep stout strange strong sweet swift tall
    tame thick thin thirsty tired true ugly unhappy upright vain warm weak
    weary wet white wicked wide wild wise wretched young""".split()
)

ADV_WORDS = frozenset(
    "again always away back down here never now often once out soon there "
    "together twice up very well yesterday today tomorrow almost already "
    "also just only still yet quite too perhaps indeed briefly".split()
)

NOUN_VOCAB = tuple(
    """animal apple basket bird boy bone branch bread bridge brother cage
    cart cat chief child city corn country crow dog door eagle earth
    farmer father field fire fish flock food forest fox friend frog fruit
    garden gate goat grape grass ground hand hare head heart hen hill home
    honey horse house hunter king lamb land lion man market master meadow
    meat milk money moon morning mother mountain mouse neck nest night ox
    path place pond prey rabbit river road rock roof room rope sea serpent
    shadow sheep shepherd side sky snake son stone stream summer sun table
    tail thief thing thorn town traveller tree village voice wall water
    way wind window winter wolf wood word world year""".split()
)

# ordered, deduplicated reserve pool for prediction back-fill
GENERAL_VOCAB = tuple(
    dict.fromkeys(sorted(VERB_BASES) + list(NOUN_VOCAB) + sorted(ADJ_WORDS) + sorted(ADV_WORDS))
)
