#include "veridict/syncorpus.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "veridict/textproc.hpp"
#include "veridict/utf8.hpp"

namespace veridict::syncorpus {
namespace {

// ----------------------------------------------------------- per-label style

struct Style {
    double marker_start = 0.0;  // discourse marker opener
    double topic = 0.0;         // topic term per sentence
    double polarity = 0.0;
    double subjective = 0.0;
    double pronoun = 0.0;
    double second_pronoun = 0.0;
    double number = 0.0;
    double rare = 0.0;         // filler draw from the rare pool
    double narrow_bias = 0.0;  // content draw from the narrow pool
    double stop_ratio = 0.0;   // filler draw from stop words
    double typo = 0.0;         // per sentence
    double quote = 0.0;
    double double_space = 0.0;
    double acronym = 0.0;
    double bang = 0.0;  // '!' terminator
    double query = 0.0; // '?' terminator
    int title_echoes = 0;
    double para_jitter = 0.0;
    double sent_jitter = 0.0;
    double word_jitter = 0.0;
};

Style style_for(Label label) {
    Style s;
    switch (label) {
        case Label::Human:
            s.marker_start = 0.06;
            s.topic = 0.35;
            s.polarity = 0.10;
            s.subjective = 0.08;
            s.pronoun = 0.45;
            s.second_pronoun = 0.15;
            s.number = 0.16;
            s.rare = 0.14;
            s.narrow_bias = 0.0;
            s.stop_ratio = 0.42;
            s.typo = 0.16;
            s.quote = 0.07;
            s.double_space = 0.09;
            s.acronym = 0.05;
            s.bang = 0.04;
            s.query = 0.03;
            s.title_echoes = 0;
            s.para_jitter = 0.8;
            s.sent_jitter = 0.7;
            s.word_jitter = 0.55;
            break;
        case Label::AIGenerated:
            s.marker_start = 0.45;
            s.topic = 0.55;
            s.polarity = 0.30;
            s.subjective = 0.28;
            s.pronoun = 0.10;
            s.second_pronoun = 0.0;
            s.number = 0.02;
            s.rare = 0.0;
            s.narrow_bias = 0.85;
            s.stop_ratio = 0.34;
            s.typo = 0.0;
            s.quote = 0.0;
            s.double_space = 0.0;
            s.acronym = 0.0;
            s.bang = 0.01;
            s.query = 0.005;
            s.title_echoes = 3;
            s.para_jitter = 0.15;
            s.sent_jitter = 0.12;
            s.word_jitter = 0.10;
            break;
        case Label::AIRephrased:
            s.marker_start = 0.14;
            s.topic = 0.40;
            s.polarity = 0.12;
            s.subjective = 0.10;
            s.pronoun = 0.28;
            s.second_pronoun = 0.04;
            s.number = 0.08;
            s.rare = 0.04;
            s.narrow_bias = 0.25;
            s.stop_ratio = 0.40;
            s.typo = 0.02;
            s.quote = 0.0;
            s.double_space = 0.0;
            s.acronym = 0.0;
            s.bang = 0.02;
            s.query = 0.015;
            s.title_echoes = 0;
            s.para_jitter = 0.4;
            s.sent_jitter = 0.35;
            s.word_jitter = 0.30;
            break;
    }
    return s;
}

// ----------------------------------------------------------- language pools

struct Pools {
    std::vector<std::string> stop;
    std::vector<std::string> content;
    std::vector<std::string> narrow;
    std::vector<std::string> rare;
    std::vector<std::string> pronouns;
    std::vector<std::vector<std::string>> markers;
    std::vector<std::string> polarity;
    std::vector<std::string> subjective;
    std::vector<std::string> acronyms;
    std::string title_noun;
    std::map<std::string, std::vector<std::string>> topics;
};

const Pools& pools_en() {
    static const Pools p = [] {
        Pools p;
        p.stop = {"the", "a",     "an",     "of",      "in",    "on",     "at",    "to",
                  "for", "with",  "from",   "by",      "and",   "or",     "but",   "as",
                  "is",  "are",   "was",    "were",    "be",    "been",   "has",   "have",
                  "had", "this",  "that",   "these",   "those", "it",     "its",   "their",
                  "there", "which", "while", "also",   "more",  "most",   "some",  "many",
                  "each", "between", "through", "during", "under", "over", "about", "after",
                  "before", "because", "than", "then",  "such",  "both",  "often", "still",
                  "not"};
        p.content = {
            "history",     "science",     "culture",   "society",    "research",  "theory",
            "method",      "system",      "process",   "development", "structure", "analysis",
            "knowledge",   "language",    "practice",  "tradition",  "century",   "region",
            "country",     "nation",      "government", "community",  "family",    "school",
            "work",        "life",        "time",      "world",      "change",    "growth",
            "model",       "value",       "idea",      "concept",    "question",  "problem",
            "answer",      "result",      "effect",    "cause",      "example",   "form",
            "part",        "group",       "level",     "state",      "power",     "force",
            "energy",      "matter",      "space",     "field",      "area",      "study",
            "book",        "paper",       "report",    "record",     "source",    "evidence",
            "detail",      "aspect",      "pattern",   "role",       "rule",      "law",
            "order",       "course",      "case",      "point",      "view",      "sense",
            "term",        "word",        "name",      "story",      "event",     "action",
            "movement",    "project",     "plan",      "goal",       "reason",    "purpose",
            "show",        "find",        "make",      "take",       "give",      "use",
            "see",         "know",        "think",     "mean",       "lead",      "help",
            "keep",        "hold",        "turn",      "move",       "play",      "live",
            "grow",        "develop",     "describe",  "explain",    "include",   "involve",
            "consider",    "suggest",     "indicate",  "reflect",    "remain",    "become",
            "create",      "provide",     "support",   "improve",    "reduce",    "increase",
            "affect",      "influence",   "require",   "allow",      "produce",   "offer",
            "present",     "compare",     "define",    "examine",    "explore",   "discuss",
            "argue",       "claim",       "note",      "observe",    "new",       "old",
            "early",       "late",        "long",      "short",      "high",      "low",
            "large",       "small",       "great",     "major",      "minor",     "common",
            "similar",     "different",   "important", "significant", "general",  "specific",
            "modern",      "ancient",     "recent",    "local",      "global",    "social",
            "cultural",    "political",   "economic",  "natural",    "physical",  "human",
            "central",     "basic",       "complex",   "simple",     "clear",     "strong",
            "weak",        "broad",       "narrow",    "certain",    "possible",  "likely",
            "true",        "real",        "whole",     "full",       "open",      "free",
            "public",      "private"};
        p.narrow = {"overview",      "summary",     "introduction", "conclusion",  "topic",
                    "subject",       "context",     "background",   "importance",  "significance",
                    "relevance",     "impact",      "benefit",      "advantage",   "factor",
                    "element",       "component",   "section",      "overall",     "key",
                    "main",          "essential",   "fundamental",  "crucial",     "notable",
                    "various",       "numerous",    "several",      "diverse",     "comprehensive",
                    "detailed",      "relevant",    "related",      "contemporary", "widely",
                    "commonly",      "generally",   "typically",    "primarily",   "particularly"};
        p.rare = {"paradigm",      "dichotomy",     "synthesis",     "anomaly",
                  "corollary",     "conjecture",    "epistemology",  "hegemony",
                  "lacuna",        "serendipity",   "ubiquity",      "quintessence",
                  "juxtaposition", "idiosyncrasy",  "conflation",    "demarcation",
                  "permutation",   "confluence",    "vicissitude",   "perspicacity",
                  "obfuscation",   "apotheosis",    "bifurcation",   "catalysis",
                  "diaspora",      "empiricism",    "heuristic",     "iconography",
                  "jubilee",       "kinship",       "mnemonic",      "nomenclature",
                  "ossification",  "palimpsest",    "quandary",      "resonance",
                  "sojourn",       "taxonomy",      "verisimilitude", "zenith"};
        p.pronouns = {"i", "you", "he", "she", "we", "they", "me", "him", "her", "us", "them"};
        p.markers = {{"however"},     {"moreover"},   {"furthermore"}, {"therefore"},
                     {"nevertheless"}, {"consequently"}, {"additionally"}, {"meanwhile"},
                     {"in", "addition"}, {"for", "example"}};
        p.polarity = {"excellent", "wonderful", "beneficial", "positive", "good",
                      "valuable",  "impressive", "terrible",  "harmful",  "negative",
                      "poor",      "dangerous", "dreadful",   "flawed"};
        p.subjective = {"arguably", "clearly",   "certainly", "probably",    "perhaps",
                        "surely",   "obviously", "seemingly", "undoubtedly", "evidently"};
        p.acronyms = {"NASA", "UNESCO", "DNA", "GDP"};
        p.title_noun = "overview";
        p.topics = {
            {"biology", {"biology", "cell", "organism", "evolution", "gene"}},
            {"chemistry", {"chemistry", "molecule", "reaction", "acid", "compound"}},
            {"geography", {"geography", "climate", "continent", "river", "mountain"}},
            {"history", {"history", "empire", "revolution", "dynasty", "war"}},
            {"it", {"software", "computer", "network", "algorithm", "data"}},
            {"music", {"music", "melody", "rhythm", "harmony", "orchestra"}},
            {"politics", {"politics", "election", "parliament", "policy", "democracy"}},
            {"religion", {"religion", "ritual", "temple", "faith", "doctrine"}},
            {"sports", {"sport", "athlete", "tournament", "stadium", "championship"}},
            {"visual arts", {"painting", "sculpture", "gallery", "canvas", "portrait"}},
        };
        return p;
    }();
    return p;
}

const Pools& pools_fr() {
    static const Pools p = [] {
        Pools p;
        p.stop = {"le",    "la",    "les",   "un",     "une",   "des",    "du",     "de",
                  "en",    "dans",  "sur",   "sous",   "avec",  "sans",   "pour",   "par",
                  "et",    "ou",    "mais",  "comme",  "est",   "sont",   "ont",    "au",
                  "aux",   "ce",    "cette", "ces",    "son",   "sa",     "ses",    "leur",
                  "qui",   "que",   "quand", "aussi",  "plus",  "moins",  "entre",  "pendant",
                  "avant", "alors", "donc",  "tel",    "seulement", "bien", "encore", "souvent",
                  "pas"};
        p.content = {
            "histoire",     "science",      "culture",     "morale",       "recherche",
            "méthode",      "système",      "processus",   "développement", "structure",
            "analyse",      "connaissance", "langue",      "pratique",     "tradition",
            "siècle",       "région",       "pays",        "nation",       "gouvernement",
            "communauté",   "famille",      "travail",     "vie",          "temps",
            "monde",        "changement",   "croissance",  "valeur",       "concept",
            "question",     "réponse",      "cause",       "exemple",      "forme",
            "partie",       "groupe",       "niveau",      "pouvoir",      "force",
            "domaine",      "livre",        "article",     "rapport",      "source",
            "preuve",       "aspect",       "rôle",        "règle",        "loi",
            "droit",        "ordre",        "cas",         "point",        "vue",
            "sens",         "terme",        "mot",         "nom",          "action",
            "mouvement",    "projet",       "plan",        "but",          "raison",
            "objectif",     "base",         "mesure",      "taux",         "tendance",
            "montrer",      "trouver",      "faire",       "prendre",      "donner",
            "utiliser",     "voir",         "savoir",      "penser",       "mener",
            "aider",        "garder",       "tenir",       "jouer",        "vivre",
            "travailler",   "grandir",      "changer",     "expliquer",    "inclure",
            "rester",       "devenir",      "fournir",     "soutenir",     "produire",
            "offrir",       "comparer",     "examiner",    "explorer",     "discuter",
            "nouveau",      "ancien",       "long",        "court",        "haut",
            "bas",          "grand",        "petit",       "majeur",       "mineur",
            "commun",       "semblable",    "différent",   "important",    "moderne",
            "local",        "mondial",      "social",      "culturel",     "politique",
            "naturel",      "physique",     "humain",      "central",      "complexe",
            "simple",       "clair",        "fort",        "faible",       "large",
            "certain",      "possible",     "probable",    "vrai",         "réel",
            "entier",       "plein",        "ouvert",      "libre",        "public",
            "privé",        "l'art",        "matière",     "saison",       "maison"};
        p.narrow = {"aperçu",       "résumé",       "introduction", "conclusion",   "sujet",
                    "contexte",     "importance",   "pertinence",   "impact",       "avantage",
                    "facteur",      "section",      "ensemble",     "essentiel",    "fondamental",
                    "crucial",      "notable",      "divers",       "nombreux",     "plusieurs",
                    "varié",        "complet",      "détaillé",     "pertinent",    "lié",
                    "contemporain", "largement",    "couramment",   "généralement", "typiquement",
                    "principalement", "notamment"};
        p.rare = {"paradigme",     "dichotomie",   "synthèse",     "anomalie",
                  "corollaire",    "conjecture",   "hégémonie",    "lacune",
                  "sérendipité",   "ubiquité",     "quintessence", "juxtaposition",
                  "idiosyncrasie", "amalgame",     "démarcation",  "permutation",
                  "confluence",    "vicissitude",  "perspicacité", "apothéose",
                  "bifurcation",   "catalyse",     "diaspora",     "empirisme",
                  "heuristique",   "iconographie", "jubilé",       "parenté",
                  "nomenclature",  "ossification", "palimpseste",  "embarras",
                  "résonance",     "séjour",       "taxonomie",    "vraisemblance",
                  "apogée",        "zénith"};
        p.pronouns = {"je", "tu", "il", "elle", "nous", "vous", "ils", "elles", "moi", "toi",
                      "lui", "eux"};
        p.markers = {{"cependant"}, {"toutefois"}, {"néanmoins"}, {"ensuite"},
                     {"enfin"},     {"ainsi"},     {"d'abord"},   {"d'ailleurs"},
                     {"par", "exemple"}, {"en", "outre"}};
        p.polarity = {"excellent", "merveilleux", "bénéfique", "positif",   "bon",
                      "précieux",  "impressionnant", "terrible", "nuisible", "négatif",
                      "mauvais",   "dangereux",   "affreux",   "défaillant"};
        p.subjective = {"certainement", "clairement",   "probablement", "sûrement",
                        "évidemment",   "manifestement", "apparemment",  "assurément",
                        "visiblement",  "vraisemblablement"};
        p.acronyms = {"ONU", "UNESCO", "ADN", "PIB"};
        p.title_noun = "aperçu";
        p.topics = {
            {"biology", {"biologie", "cellule", "organisme", "évolution", "gène"}},
            {"chemistry", {"chimie", "molécule", "réaction", "acide", "composé"}},
            {"geography", {"géographie", "climat", "continent", "fleuve", "montagne"}},
            {"history", {"histoire", "empire", "révolution", "dynastie", "guerre"}},
            {"it", {"logiciel", "ordinateur", "réseau", "algorithme", "données"}},
            {"music", {"musique", "mélodie", "rythme", "harmonie", "orchestre"}},
            {"politics", {"politique", "élection", "parlement", "démocratie", "ministère"}},
            {"religion", {"religion", "rituel", "temple", "foi", "doctrine"}},
            {"sports", {"sport", "athlète", "tournoi", "stade", "championnat"}},
            {"visual arts", {"peinture", "sculpture", "galerie", "toile", "portrait"}},
        };
        return p;
    }();
    return p;
}

const Pools& pools_de() {
    static const Pools p = [] {
        Pools p;
        p.stop = {"der",   "die",    "das",   "ein",   "eine",  "einer", "eines", "dem",
                  "den",   "des",    "und",   "oder",  "aber",  "als",   "wie",   "ist",
                  "sind",  "war",    "waren", "hat",   "haben", "wird",  "werden", "kann",
                  "soll",  "muss",   "in",    "an",    "auf",   "aus",   "bei",   "mit",
                  "nach",  "von",    "vor",   "zu",    "über",  "unter", "zwischen", "durch",
                  "für",   "gegen",  "ohne",  "um",    "auch",  "mehr",  "sehr",  "oft",
                  "noch",  "nur",    "dann",  "wenn",  "weil",  "dass",  "dieser", "diese",
                  "dieses", "sein",  "so",    "schon", "etwa",  "dabei", "dazu",  "nicht"};
        p.content = {
            "Geschichte",   "Wissenschaft", "Kultur",      "Gesellschaft", "Forschung",
            "Theorie",      "Methode",      "System",      "Prozess",      "Entwicklung",
            "Struktur",     "Analyse",      "Wissen",      "Sprache",      "Praxis",
            "Tradition",    "Jahrhundert",  "Region",      "Land",         "Nation",
            "Regierung",    "Gemeinschaft", "Familie",     "Schule",       "Arbeit",
            "Leben",        "Zeit",         "Welt",        "Wandel",       "Wachstum",
            "Modell",       "Wert",         "Idee",        "Konzept",      "Frage",
            "Problem",      "Antwort",      "Ergebnis",    "Wirkung",      "Ursache",
            "Beispiel",     "Form",         "Teil",        "Gruppe",       "Ebene",
            "Staat",        "Kraft",        "Energie",     "Materie",      "Raum",
            "Bereich",      "Studie",       "Buch",        "Artikel",      "Bericht",
            "Quelle",       "Beweis",       "Detail",      "Aspekt",       "Merkmal",
            "Muster",       "Rolle",        "Regel",       "Gesetz",       "Recht",
            "Ordnung",      "Fall",         "Punkt",       "Sicht",        "Sinn",
            "Begriff",      "Wort",         "Name",        "Ereignis",     "Handlung",
            "Bewegung",     "Projekt",      "Plan",        "Ziel",         "Grund",
            "Zweck",        "Grundlage",    "Umfang",      "Grad",         "Menge",
            "Anteil",       "Tendenz",      "Haus",        "Straße",       "Stadt",
            "zeigen",       "finden",       "machen",      "nehmen",       "geben",
            "nutzen",       "sehen",        "wissen",      "denken",       "bedeuten",
            "führen",       "helfen",       "halten",      "spielen",      "leben",
            "arbeiten",     "wachsen",      "ändern",      "entwickeln",   "beschreiben",
            "erklären",     "umfassen",     "betreffen",   "betrachten",   "bleiben",
            "schaffen",     "bieten",       "verbessern",  "verringern",   "erhöhen",
            "beeinflussen", "erfordern",    "erlauben",    "erzeugen",     "vergleichen",
            "definieren",   "untersuchen",  "erkunden",    "diskutieren",  "neu",
            "alt",          "früh",         "spät",        "lang",         "kurz",
            "hoch",         "niedrig",      "groß",        "klein",        "wichtig",
            "bedeutend",    "allgemein",    "spezifisch",  "modern",       "lokal",
            "global",       "sozial",       "kulturell",   "politisch",    "wirtschaftlich",
            "natürlich",    "physisch",     "menschlich",  "zentral",      "einfach",
            "komplex",      "klar",         "stark",       "schwach",      "breit",
            "eng",          "sicher",       "möglich",     "wahrscheinlich", "wahr",
            "echt",         "ganz",         "voll",        "offen",        "frei",
            "öffentlich",   "privat"};
        p.narrow = {"Überblick",     "Zusammenfassung", "Einleitung",  "Schluss",
                    "Thema",         "Kontext",         "Hintergrund", "Bedeutung",
                    "Relevanz",      "Einfluss",        "Nutzen",      "Vorteil",
                    "Faktor",        "Element",         "Bestandteil", "Abschnitt",
                    "insgesamt",     "wesentlich",      "grundlegend", "entscheidend",
                    "bemerkenswert", "verschieden",     "zahlreich",   "mehrere",
                    "vielfältig",    "umfassend",       "detailliert", "relevant",
                    "verwandt",      "weithin",         "üblicherweise", "typischerweise",
                    "hauptsächlich", "besonders",       "insbesondere"};
        p.rare = {"Paradigma",    "Dichotomie",    "Synthese",        "Anomalie",
                  "Korollar",     "Vermutung",     "Epistemologie",   "Hegemonie",
                  "Quintessenz",  "Eigenart",      "Abgrenzung",      "Permutation",
                  "Zusammenfluss", "Wechselfall",  "Scharfsinn",      "Verschleierung",
                  "Apotheose",    "Gabelung",      "Katalyse",        "Diaspora",
                  "Empirismus",   "Heuristik",     "Ikonographie",    "Jubiläum",
                  "Verwandtschaft", "Nomenklatur", "Verknöcherung",   "Palimpsest",
                  "Zwickmühle",   "Resonanz",      "Aufenthalt",      "Taxonomie",
                  "Höhepunkt",    "Zenit",         "Weltgeist",       "Gedankengut"};
        p.pronouns = {"ich", "du", "er", "sie", "wir", "mich", "dich", "ihn", "uns",
                      "euch", "ihnen"};
        p.markers = {{"jedoch"},    {"außerdem"},  {"zudem"},      {"daher"},
                     {"dennoch"},   {"folglich"},  {"zusätzlich"}, {"inzwischen"},
                     {"andererseits"}, {"zum", "Beispiel"}};
        p.polarity = {"ausgezeichnet", "wunderbar",  "vorteilhaft", "positiv",  "gut",
                      "wertvoll",      "beeindruckend", "schrecklich", "schädlich", "negativ",
                      "schlecht",      "gefährlich", "furchtbar",   "fehlerhaft"};
        p.subjective = {"sicherlich",      "eindeutig",  "vielleicht", "gewiss",
                        "offensichtlich",  "anscheinend", "vermutlich", "zweifellos",
                        "scheinbar",       "womöglich"};
        p.acronyms = {"UNESCO", "DNS", "BIP", "EZB"};
        p.title_noun = "Überblick";
        p.topics = {
            {"biology", {"Biologie", "Zelle", "Organismus", "Evolution", "Gen"}},
            {"chemistry", {"Chemie", "Molekül", "Reaktion", "Säure", "Verbindung"}},
            {"geography", {"Geographie", "Klima", "Kontinent", "Fluss", "Gebirge"}},
            {"history", {"Geschichte", "Reich", "Revolution", "Dynastie", "Krieg"}},
            {"it", {"Software", "Computer", "Netzwerk", "Algorithmus", "Daten"}},
            {"music", {"Musik", "Melodie", "Rhythmus", "Harmonie", "Orchester"}},
            {"politics", {"Politik", "Wahl", "Parlament", "Demokratie", "Ministerium"}},
            {"religion", {"Religion", "Ritual", "Tempel", "Glaube", "Doktrin"}},
            {"sports", {"Sport", "Athlet", "Turnier", "Stadion", "Meisterschaft"}},
            {"visual arts", {"Malerei", "Skulptur", "Galerie", "Leinwand", "Porträt"}},
        };
        return p;
    }();
    return p;
}

const Pools& pools_es() {
    static const Pools p = [] {
        Pools p;
        p.stop = {"el",    "la",     "los",   "las",    "un",    "una",    "unos",  "unas",
                  "de",    "del",    "en",    "sobre",  "bajo",  "con",    "sin",   "para",
                  "por",   "y",      "o",     "pero",   "como",  "es",     "son",   "era",
                  "eran",  "ha",     "han",   "fue",    "este",  "esta",   "estos", "estas",
                  "su",    "sus",    "que",   "cuando", "también", "más",  "menos", "muy",
                  "entre", "durante", "antes", "después", "porque", "si",   "entonces", "tal",
                  "solo",  "donde",  "cada",  "otro",   "otra",  "al",     "lo",    "se",
                  "ya",    "aún"};
        p.content = {
            "historia",      "ciencia",      "cultura",     "sociedad",    "investigación",
            "teoría",        "método",       "sistema",     "proceso",     "desarrollo",
            "estructura",    "análisis",     "conocimiento", "lengua",     "práctica",
            "tradición",     "siglo",        "región",      "país",        "nación",
            "gobierno",      "comunidad",    "familia",     "escuela",     "trabajo",
            "vida",          "tiempo",       "mundo",       "cambio",      "crecimiento",
            "modelo",        "valor",        "idea",        "concepto",    "pregunta",
            "problema",      "respuesta",    "resultado",   "efecto",      "causa",
            "ejemplo",       "forma",        "parte",       "grupo",       "nivel",
            "estado",        "poder",        "fuerza",      "energía",     "materia",
            "espacio",       "campo",        "estudio",     "libro",       "artículo",
            "informe",       "fuente",       "prueba",      "detalle",     "aspecto",
            "rasgo",         "patrón",       "papel",       "regla",       "ley",
            "derecho",       "orden",        "caso",        "punto",       "vista",
            "sentido",       "término",      "palabra",     "nombre",      "evento",
            "acción",        "movimiento",   "proyecto",    "plan",        "meta",
            "razón",         "propósito",    "base",        "escala",      "grado",
            "medida",        "cantidad",     "tasa",        "tendencia",   "mostrar",
            "encontrar",     "hacer",        "tomar",       "dar",         "usar",
            "ver",           "saber",        "pensar",      "significar",  "llevar",
            "ayudar",        "mantener",     "sostener",    "mover",       "jugar",
            "vivir",         "trabajar",     "crecer",      "cambiar",     "desarrollar",
            "describir",     "explicar",     "incluir",     "implicar",    "considerar",
            "sugerir",       "indicar",      "reflejar",    "quedar",      "volver",
            "crear",         "proveer",      "apoyar",      "mejorar",     "reducir",
            "aumentar",      "afectar",      "influir",     "requerir",    "permitir",
            "producir",      "ofrecer",      "presentar",   "comparar",    "definir",
            "examinar",      "explorar",     "discutir",    "nuevo",       "viejo",
            "temprano",      "tardío",       "largo",       "corto",       "alto",
            "grande",        "pequeño",      "mayor",       "menor",       "común",
            "similar",       "diferente",    "importante",  "significativo", "general",
            "específico",    "moderno",      "antiguo",     "reciente",    "local",
            "global",        "social",       "cultural",    "político",    "económico",
            "natural",       "físico",       "humano",      "central",     "básico",
            "complejo",      "simple",       "claro",       "fuerte",      "débil",
            "amplio",        "estrecho",     "cierto",      "posible",     "probable",
            "verdadero",     "real",         "entero",      "pleno",       "abierto",
            "libre",         "público",      "privado"};
        p.narrow = {"resumen",       "panorama",     "introducción", "conclusión",
                    "tema",          "contexto",     "fondo",        "importancia",
                    "relevancia",    "impacto",      "beneficio",    "ventaja",
                    "factor",        "elemento",     "componente",   "sección",
                    "conjunto",      "esencial",     "fundamental",  "crucial",
                    "notable",       "diverso",      "numeroso",     "varios",
                    "variado",       "completo",     "detallado",    "pertinente",
                    "relacionado",   "contemporáneo", "ampliamente",  "comúnmente",
                    "generalmente",  "típicamente",  "principalmente", "particularmente",
                    "especialmente"};
        p.rare = {"paradigma",     "dicotomía",     "síntesis",     "anomalía",
                  "corolario",     "conjetura",     "epistemología", "hegemonía",
                  "laguna",        "serendipia",    "ubicuidad",    "quintaesencia",
                  "yuxtaposición", "idiosincrasia", "amalgama",     "demarcación",
                  "permutación",   "confluencia",   "vicisitud",    "perspicacia",
                  "ofuscación",    "apoteosis",     "bifurcación",  "catálisis",
                  "diáspora",      "empirismo",     "heurística",   "iconografía",
                  "jubileo",       "parentesco",    "liminalidad",  "mnemotecnia",
                  "nomenclatura",  "osificación",   "palimpsesto",  "encrucijada",
                  "resonancia",    "estancia",      "taxonomía",    "verosimilitud",
                  "cúspide",       "cenit"};
        p.pronouns = {"yo", "tú", "él", "ella", "nosotros", "vosotros", "ellos", "ellas",
                      "mí", "ti", "nos", "les"};
        p.markers = {{"sin", "embargo"}, {"además"},    {"asimismo"},  {"luego"},
                     {"finalmente"},     {"igualmente"}, {"mientras"},  {"por", "ejemplo"},
                     {"en", "cambio"},   {"no", "obstante"}};
        p.polarity = {"excelente", "maravilloso", "beneficioso", "positivo",  "bueno",
                      "valioso",   "impresionante", "terrible",  "dañino",    "negativo",
                      "malo",      "peligroso",   "espantoso",   "defectuoso"};
        p.subjective = {"ciertamente",  "claramente",  "probablemente",  "quizás",
                        "seguramente",  "obviamente",  "aparentemente",  "posiblemente",
                        "indudablemente", "supuestamente"};
        p.acronyms = {"ONU", "UNESCO", "ADN", "PIB"};
        p.title_noun = "panorama";
        p.topics = {
            {"biology", {"biología", "célula", "organismo", "evolución", "gen"}},
            {"chemistry", {"química", "molécula", "reacción", "ácido", "compuesto"}},
            {"geography", {"geografía", "clima", "continente", "río", "montaña"}},
            {"history", {"historia", "imperio", "revolución", "dinastía", "guerra"}},
            {"it", {"software", "computadora", "red", "algoritmo", "datos"}},
            {"music", {"música", "melodía", "ritmo", "armonía", "orquesta"}},
            {"politics", {"política", "elección", "parlamento", "democracia", "ministerio"}},
            {"religion", {"religión", "ritual", "templo", "fe", "doctrina"}},
            {"sports", {"deporte", "atleta", "torneo", "estadio", "campeonato"}},
            {"visual arts", {"pintura", "escultura", "galería", "lienzo", "retrato"}},
        };
        return p;
    }();
    return p;
}

const Pools& pools_for(Language language) {
    switch (language) {
        case Language::EN: return pools_en();
        case Language::FR: return pools_fr();
        case Language::DE: return pools_de();
        case Language::ES: return pools_es();
    }
    throw std::logic_error("bad Language value");
}

// --------------------------------------------------------- sentence assembly

bool chance(Rng& rng, double p) { return p > 0.0 && rng.next_double() < p; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
    return pool[static_cast<std::size_t>(rng.next_below(pool.size()))];
}

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool all_ascii_lower(const std::string& w) {
    if (w.empty()) return false;
    for (char c : w)
        if (c < 'a' || c > 'z') return false;
    return true;
}

bool all_digits(const std::string& w) {
    if (w.empty()) return false;
    for (char c : w)
        if (c < '0' || c > '9') return false;
    return true;
}

bool all_ascii_upper(const std::string& w) {
    if (w.empty()) return false;
    for (char c : w)
        if (c < 'A' || c > 'Z') return false;
    return true;
}

// allowed to close a sentence: letters, >= 2 codepoints, not an acronym, and
// not an abbreviation (the trailing period would suppress the sentence break)
bool safe_final(const std::string& w, const textproc::LanguagePack& pack) {
    return !all_digits(w) && !all_ascii_upper(w) && utf8::decode_all(w).size() >= 2 &&
           pack.abbreviations.count(utf8::fold_case(w)) == 0;
}

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
    return w;
}

std::string mutate_word(const std::string& w, Rng& rng, const std::set<std::string>& dict) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        std::string m = w;
        switch (rng.next_below(3)) {
            case 0: m.erase(1 + rng.next_below(m.size() - 2), 1); break;
            case 1: {
                std::size_t i = 1 + static_cast<std::size_t>(rng.next_below(m.size() - 2));
                std::swap(m[i], m[i + 1]);
                break;
            }
            default:
                m.insert(1 + rng.next_below(m.size() - 1), 1,
                         m[rng.next_below(m.size())]);
                break;
        }
        if (m != w && m.size() >= 2 && dict.count(utf8::fold_case(m)) == 0) return m;
    }
    std::string m = w + "x";
    while (dict.count(utf8::fold_case(m)) != 0) m += "x";
    return m;
}

struct Piece {
    std::string text;
    bool filler = false;
    bool echo = false;
};

std::string build_sentence(int budget, const Pools& pools, const Style& style,
                           const std::string& topic, const std::vector<std::string>* echo,
                           const textproc::LanguagePack& pack, Rng& rng) {
    int slots = budget;

    std::vector<std::vector<std::string>> blocks;
    std::vector<bool> block_is_echo;
    if (echo != nullptr && slots >= static_cast<int>(echo->size()) + 3) {
        blocks.push_back(*echo);
        block_is_echo.push_back(true);
        slots -= static_cast<int>(echo->size());
    }

    std::vector<std::string> opener;
    if (chance(rng, style.marker_start)) {
        const std::vector<std::string>& m = pick(rng, pools.markers);
        if (static_cast<int>(m.size()) <= slots - 3) {
            opener = m;
            slots -= static_cast<int>(m.size());
        }
    }

    auto add_single = [&](double prob, const std::string& word) {
        if (slots > 3 && chance(rng, prob)) {
            blocks.push_back({word});
            block_is_echo.push_back(false);
            --slots;
            return true;
        }
        return false;
    };
    add_single(style.topic, pick(rng, pools.topics.at(topic)));
    add_single(style.polarity, pick(rng, pools.polarity));
    add_single(style.subjective, pick(rng, pools.subjective));
    if (add_single(style.pronoun, pick(rng, pools.pronouns)))
        add_single(style.second_pronoun, pick(rng, pools.pronouns));
    if (slots > 3 && chance(rng, style.number)) {
        blocks.push_back({std::to_string(1800 + rng.next_below(225))});
        block_is_echo.push_back(false);
        --slots;
    }
    if (!pools.acronyms.empty()) add_single(style.acronym, pick(rng, pools.acronyms));

    auto pick_content = [&](bool ascii_start) -> std::string {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const std::vector<std::string>& pool =
                chance(rng, style.narrow_bias) ? pools.narrow : pools.content;
            const std::string& w = pick(rng, pool);
            if (!ascii_start || ascii_alpha(w[0])) return w;
        }
        return pools.content.front();
    };

    std::vector<Piece> pieces;
    for (int i = 0; i < slots; ++i) {
        std::string w;
        if (i == 0) {
            w = pick_content(true);
        } else {
            double r = rng.next_double();
            if (r < style.stop_ratio) {
                w = pick(rng, pools.stop);
            } else if (r < style.stop_ratio + style.rare) {
                w = pick(rng, pools.rare);
            } else {
                w = pick_content(false);
            }
        }
        pieces.push_back({w, true, false});
    }

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        std::size_t pos = 1 + static_cast<std::size_t>(rng.next_below(pieces.size()));
        std::vector<Piece> unit;
        for (const std::string& w : blocks[b]) unit.push_back({w, false, block_is_echo[b]});
        pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(pos), unit.begin(), unit.end());
    }
    for (auto it = opener.rbegin(); it != opener.rend(); ++it)
        pieces.insert(pieces.begin(), {*it, false, false});

    // a number, acronym, or one-letter word must not close the sentence
    if (!safe_final(pieces.back().text, pack)) {
        for (std::size_t j = pieces.size() - 1; j-- > 0;) {
            if (pieces[j].filler && safe_final(pieces[j].text, pack)) {
                std::swap(pieces[j], pieces.back());
                break;
            }
        }
    }

    if (chance(rng, style.typo)) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 1; i < pieces.size(); ++i) {
            if (pieces[i].filler && pieces[i].text.size() >= 4 &&
                all_ascii_lower(pieces[i].text))
                candidates.push_back(i);
        }
        if (!candidates.empty()) {
            std::size_t i = pick(rng, candidates);
            pieces[i].text = mutate_word(pieces[i].text, rng, pack.word_list);
        }
    }

    if (chance(rng, style.quote)) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 1; i + 1 < pieces.size(); ++i)
            if (pieces[i].filler) candidates.push_back(i);
        if (!candidates.empty()) {
            std::size_t i = pick(rng, candidates);
            pieces[i].text = "\"" + pieces[i].text + "\"";
        }
    }

    if (pieces.size() >= 9 && chance(rng, 0.35)) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 2; i + 2 < pieces.size(); ++i)
            if (pieces[i].filler) candidates.push_back(i);
        if (!candidates.empty()) pieces[pick(rng, candidates)].text += ",";
    }

    std::size_t wide_gap = 0;  // 0 = none; g means double space before piece g
    if (chance(rng, style.double_space)) {
        std::vector<std::size_t> gaps;
        for (std::size_t g = 1; g < pieces.size(); ++g)
            if (!(pieces[g - 1].echo && pieces[g].echo)) gaps.push_back(g);
        if (!gaps.empty()) wide_gap = pick(rng, gaps);
    }

    std::string out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i > 0) out += (i == wide_gap) ? "  " : " ";
        out += i == 0 ? capitalize(pieces[i].text) : pieces[i].text;
    }
    if (chance(rng, style.bang)) {
        out += "!";
    } else if (chance(rng, style.query)) {
        out += "?";
    } else {
        out += ".";
    }
    return out;
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return s;
}

}  // namespace

// ------------------------------------------------------------------- public

CellTargets targets_for(Language language, Label label) {
    // documents, paragraphs, sentences, words
    static const std::map<std::pair<Language, Label>, CellTargets> kTargets = {
        {{Language::EN, Label::Human}, {100, 415, 1700, 38300}},
        {{Language::EN, Label::AIGenerated}, {100, 555, 1400, 27600}},
        {{Language::EN, Label::AIRephrased}, {100, 255, 1100, 24600}},
        {{Language::FR, Label::Human}, {100, 415, 1200, 31000}},
        {{Language::FR, Label::AIGenerated}, {100, 524, 1300, 26500}},
        {{Language::FR, Label::AIRephrased}, {100, 157, 800, 18700}},
        {{Language::DE, Label::Human}, {100, 335, 1200, 20500}},
        {{Language::DE, Label::AIGenerated}, {100, 529, 1400, 22900}},
        {{Language::DE, Label::AIRephrased}, {100, 256, 1000, 16400}},
        {{Language::ES, Label::Human}, {100, 450, 1400, 38000}},
        {{Language::ES, Label::AIGenerated}, {100, 514, 1200, 26800}},
        {{Language::ES, Label::AIRephrased}, {100, 190, 800, 18900}},
    };
    return kTargets.at({language, label});
}

std::vector<int> partition_exact(int total, int n, int min_each, double jitter, Rng& rng) {
    if (n <= 0) throw std::invalid_argument("partition_exact: n must be positive");
    if (total < n * min_each) throw std::invalid_argument("partition_exact: total too small");
    std::vector<int> parts(static_cast<std::size_t>(n), total / n);
    for (int i = 0; i < total % n; ++i) parts[static_cast<std::size_t>(i)] += 1;
    rng.shuffle(parts);

    if (jitter > 0.0) {
        int base = total / n;
        int span = std::max(1, static_cast<int>(base * jitter));
        int cap = base * 4 + 8;
        for (int move = 0; move < 2 * n; ++move) {
            std::size_t i = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n)));
            std::size_t j = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            int amount = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(span)));
            amount = std::min(amount, parts[i] - min_each);
            amount = std::min(amount, cap - parts[j]);
            if (amount <= 0) continue;
            parts[i] -= amount;
            parts[j] += amount;
        }
    }
    return parts;
}

std::vector<std::string> vocabulary(Language language) {
    const Pools& pools = pools_for(language);
    std::set<std::string> all;
    auto add = [&](const std::vector<std::string>& pool) { all.insert(pool.begin(), pool.end()); };
    add(pools.stop);
    add(pools.content);
    add(pools.narrow);
    add(pools.rare);
    add(pools.pronouns);
    add(pools.polarity);
    add(pools.subjective);
    for (const auto& marker : pools.markers) add(marker);
    for (const auto& [topic, terms] : pools.topics) add(terms);
    all.insert(pools.title_noun);
    return {all.begin(), all.end()};
}

std::vector<std::string> acronym_pool(Language language) { return pools_for(language).acronyms; }

std::vector<corpus::Document> generate(const corpus::PackSet& packs, std::uint64_t seed) {
    std::vector<corpus::Document> docs;
    constexpr std::array<Label, 3> kLabels = {Label::Human, Label::AIGenerated,
                                              Label::AIRephrased};
    for (Language language : kAllLanguages) {
        const textproc::LanguagePack& pack = packs.at(language);
        const Pools& pools = pools_for(language);
        for (Label label : kLabels) {
            const CellTargets targets = targets_for(language, label);
            const Style style = style_for(label);
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(language) * 8 +
                                       static_cast<std::uint64_t>(label)));

            std::vector<int> paras_per_doc =
                partition_exact(targets.paragraphs, targets.documents, 1, style.para_jitter, rng);
            std::vector<int> sents_per_para =
                partition_exact(targets.sentences, targets.paragraphs, 2, style.sent_jitter, rng);
            std::vector<int> words_per_sent =
                partition_exact(targets.words, targets.sentences, 5, style.word_jitter, rng);

            std::size_t para_i = 0;
            std::size_t sent_i = 0;
            for (int d = 0; d < targets.documents; ++d) {
                const std::string topic(corpus::kTopics[static_cast<std::size_t>(d) / 10]);
                std::vector<std::string> title_tokens =
                    split(pools.topics.at(topic).front(), ' ');
                title_tokens.push_back(pools.title_noun);

                int doc_paras = paras_per_doc[static_cast<std::size_t>(d)];
                int doc_sents = 0;
                for (int q = 0; q < doc_paras; ++q)
                    doc_sents += sents_per_para[para_i + static_cast<std::size_t>(q)];

                std::set<int> echo_at;
                for (int e = 0; e < style.title_echoes && doc_sents > 0; ++e)
                    echo_at.insert(static_cast<int>(rng.next_below(
                        static_cast<std::uint64_t>(doc_sents))));

                int doc_words = 0;
                int local_sent = 0;
                std::vector<std::string> paragraphs;
                for (int q = 0; q < doc_paras; ++q) {
                    int n_sents = sents_per_para[para_i++];
                    std::vector<std::string> sentences;
                    for (int s = 0; s < n_sents; ++s, ++local_sent) {
                        int budget = words_per_sent[sent_i++];
                        doc_words += budget;
                        const std::vector<std::string>* echo =
                            echo_at.count(local_sent) ? &title_tokens : nullptr;
                        sentences.push_back(
                            build_sentence(budget, pools, style, topic, echo, pack, rng));
                    }
                    paragraphs.push_back(join(sentences, " "));
                }

                corpus::Document doc;
                doc.language = language;
                doc.label = label;
                doc.topic = topic;
                std::string topic_id = topic;
                std::replace(topic_id.begin(), topic_id.end(), ' ', '_');
                char nn[8];
                std::snprintf(nn, sizeof nn, "%02d", d % 10);
                doc.id = lower_ascii(to_string(language)) + "-" +
                         lower_ascii(to_string(label)) + "-" + topic_id + "_" + nn;
                doc.title = capitalize(join(title_tokens, " "));
                doc.body = join(paragraphs, "\n\n");

                textproc::TokenizedDocument tok = textproc::analyze(doc.body, pack);
                if (static_cast<int>(tok.paragraphs.size()) != doc_paras ||
                    static_cast<int>(tok.sentence_count()) != doc_sents ||
                    static_cast<int>(tok.word_count()) != doc_words) {
                    throw std::logic_error("generated document " + doc.id +
                                           " drifted from its size targets");
                }
                docs.push_back(std::move(doc));
            }
        }
    }
    return docs;
}

}  // namespace veridict::syncorpus
