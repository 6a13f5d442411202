#include "groundwork/error.hpp"

namespace groundwork {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "ValidationError";
        case ErrorCode::duplicate_id: return "DuplicateId";
        case ErrorCode::inconsistent_change: return "InconsistentChange";
        case ErrorCode::budget_too_small: return "BudgetTooSmall";
        case ErrorCode::no_action_block: return "NoActionBlock";
        case ErrorCode::malformed_action: return "MalformedAction";
        case ErrorCode::bad_target_id: return "BadTargetId";
        case ErrorCode::all_samples_malformed: return "AllSamplesMalformed";
        case ErrorCode::unordered_input: return "UnorderedInput";
        case ErrorCode::empty_segment: return "EmptySegment";
        case ErrorCode::already_decided: return "AlreadyDecided";
        case ErrorCode::target_missing: return "TargetMissing";
        case ErrorCode::not_found: return "NotFound";
        case ErrorCode::corrupt_store: return "CorruptStore";
        case ErrorCode::unknown_element: return "UnknownElement";
        case ErrorCode::missing_bundle: return "MissingBundle";
        case ErrorCode::model_backend: return "ModelBackendError";
        case ErrorCode::io: return "IoError";
    }
    return "Error";
}

}  // namespace groundwork
