//! IRIs of the vocabularies the validator reads and writes.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    pub const IMPORTS: &str = "http://www.w3.org/2002/07/owl#imports";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const NON_POSITIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#nonPositiveInteger";
    pub const NEGATIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#negativeInteger";
    pub const LONG: &str = "http://www.w3.org/2001/XMLSchema#long";
    pub const INT: &str = "http://www.w3.org/2001/XMLSchema#int";
    pub const SHORT: &str = "http://www.w3.org/2001/XMLSchema#short";
    pub const BYTE: &str = "http://www.w3.org/2001/XMLSchema#byte";
    pub const NON_NEGATIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#nonNegativeInteger";
    pub const UNSIGNED_LONG: &str = "http://www.w3.org/2001/XMLSchema#unsignedLong";
    pub const UNSIGNED_INT: &str = "http://www.w3.org/2001/XMLSchema#unsignedInt";
    pub const UNSIGNED_SHORT: &str = "http://www.w3.org/2001/XMLSchema#unsignedShort";
    pub const UNSIGNED_BYTE: &str = "http://www.w3.org/2001/XMLSchema#unsignedByte";
    pub const POSITIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#positiveInteger";
}

/// The shapes vocabulary. Every term lives under [`sh::NS`].
pub mod sh {
    macro_rules! sh_terms {
        ($($name:ident = $local:literal;)*) => {
            $(pub const $name: &str = concat!("http://example.org/ns/shacl#", $local);)*
        };
    }

    pub const NS: &str = "http://example.org/ns/shacl#";

    sh_terms! {
        SHAPE = "Shape";
        TARGET_NODE = "targetNode";
        TARGET_CLASS = "targetClass";
        TARGET_SUBJECTS_OF = "targetSubjectsOf";
        TARGET_OBJECTS_OF = "targetObjectsOf";
        SEVERITY = "severity";
        MESSAGE = "message";
        DEACTIVATED = "deactivated";
        PATH = "path";
        ENTAILMENT = "entailment";
        SHAPES_GRAPH = "shapesGraph";

        VIOLATION = "Violation";
        WARNING = "Warning";
        INFO = "Info";

        ALTERNATIVE_PATH = "alternativePath";
        INVERSE_PATH = "inversePath";
        ZERO_OR_MORE_PATH = "zeroOrMorePath";
        ONE_OR_MORE_PATH = "oneOrMorePath";
        ZERO_OR_ONE_PATH = "zeroOrOnePath";

        VALIDATION_REPORT = "ValidationReport";
        VALIDATION_RESULT = "ValidationResult";
        CONFORMS = "conforms";
        RESULT = "result";
        FOCUS_NODE = "focusNode";
        VALUE_NODE = "valueNode";
        RESULT_PATH = "resultPath";
        SOURCE_SHAPE = "sourceShape";
        SOURCE_CONSTRAINT_COMPONENT = "sourceConstraintComponent";
        RESULT_SEVERITY = "resultSeverity";
        RESULT_MESSAGE = "resultMessage";
        DETAIL = "detail";

        BLANK_NODE = "BlankNode";
        IRI = "IRI";
        LITERAL = "Literal";

        CLASS = "class";
        DATATYPE = "datatype";
        NODE_KIND = "nodeKind";
        MIN_COUNT = "minCount";
        MAX_COUNT = "maxCount";
        MIN_EXCLUSIVE = "minExclusive";
        MIN_INCLUSIVE = "minInclusive";
        MAX_EXCLUSIVE = "maxExclusive";
        MAX_INCLUSIVE = "maxInclusive";
        MIN_LENGTH = "minLength";
        MAX_LENGTH = "maxLength";
        PATTERN = "pattern";
        FLAGS = "flags";
        STEM = "stem";
        LANGUAGE_IN = "languageIn";
        UNIQUE_LANG = "uniqueLang";
        EQUALS = "equals";
        DISJOINT = "disjoint";
        LESS_THAN = "lessThan";
        LESS_THAN_OR_EQUALS = "lessThanOrEquals";
        SHAPE_PARAM = "shape";
        NOT = "not";
        AND = "and";
        OR = "or";
        QUALIFIED_VALUE_SHAPE = "qualifiedValueShape";
        QUALIFIED_MIN_COUNT = "qualifiedMinCount";
        QUALIFIED_MAX_COUNT = "qualifiedMaxCount";
        CLOSED = "closed";
        IGNORED_PROPERTIES = "ignoredProperties";
        HAS_VALUE = "hasValue";
        IN = "in";

        CLASS_COMPONENT = "ClassConstraintComponent";
        DATATYPE_COMPONENT = "DatatypeConstraintComponent";
        NODE_KIND_COMPONENT = "NodeKindConstraintComponent";
        MIN_COUNT_COMPONENT = "MinCountConstraintComponent";
        MAX_COUNT_COMPONENT = "MaxCountConstraintComponent";
        MIN_EXCLUSIVE_COMPONENT = "MinExclusiveConstraintComponent";
        MIN_INCLUSIVE_COMPONENT = "MinInclusiveConstraintComponent";
        MAX_EXCLUSIVE_COMPONENT = "MaxExclusiveConstraintComponent";
        MAX_INCLUSIVE_COMPONENT = "MaxInclusiveConstraintComponent";
        MIN_LENGTH_COMPONENT = "MinLengthConstraintComponent";
        MAX_LENGTH_COMPONENT = "MaxLengthConstraintComponent";
        PATTERN_COMPONENT = "PatternConstraintComponent";
        STEM_COMPONENT = "StemConstraintComponent";
        LANGUAGE_IN_COMPONENT = "LanguageInConstraintComponent";
        UNIQUE_LANG_COMPONENT = "UniqueLangConstraintComponent";
        EQUALS_COMPONENT = "EqualsConstraintComponent";
        DISJOINT_COMPONENT = "DisjointConstraintComponent";
        LESS_THAN_COMPONENT = "LessThanConstraintComponent";
        LESS_THAN_OR_EQUALS_COMPONENT = "LessThanOrEqualsConstraintComponent";
        SHAPE_COMPONENT = "ShapeConstraintComponent";
        NOT_COMPONENT = "NotConstraintComponent";
        AND_COMPONENT = "AndConstraintComponent";
        OR_COMPONENT = "OrConstraintComponent";
        QUALIFIED_VALUE_SHAPE_COMPONENT = "QualifiedValueShapeConstraintComponent";
        CLOSED_COMPONENT = "ClosedConstraintComponent";
        HAS_VALUE_COMPONENT = "HasValueConstraintComponent";
        IN_COMPONENT = "InConstraintComponent";
    }
}

/// Prefixes used when writing Turtle.
pub const WELL_KNOWN_PREFIXES: &[(&str, &str)] = &[
    ("owl", owl::NS),
    ("rdf", rdf::NS),
    ("rdfs", rdfs::NS),
    ("sh", sh::NS),
    ("xsd", xsd::NS),
];
