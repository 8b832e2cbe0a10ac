#pragma once

#include <stdexcept>
#include <string>

namespace palmid {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidEmbedding : Error { using Error::Error; };
struct CorruptTemplate : Error { using Error::Error; };
struct TruncatedTemplate : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct InvalidWeight : Error { using Error::Error; };
struct EmptyGallery : Error { using Error::Error; };
struct CorruptGallery : Error { using Error::Error; };
struct TruncatedGallery : Error { using Error::Error; };
struct EmptyScoreSet : Error { using Error::Error; };
struct NoMatedTrials : Error { using Error::Error; };
struct InsufficientTrials : Error { using Error::Error; };
struct AllRejected : Error { using Error::Error; };
struct MissingModel : Error { using Error::Error; };
struct MixedQualityMethods : Error { using Error::Error; };
struct RoiTooSmall : Error { using Error::Error; };
struct TrainingDiverged : Error { using Error::Error; };
struct DegenerateKeypoints : Error { using Error::Error; };
struct SingularHomography : Error { using Error::Error; };
struct DegenerateControlPoints : Error { using Error::Error; };
struct BadPatchSize : Error { using Error::Error; };
struct UnknownSubject : Error { using Error::Error; };
struct BadImage : Error { using Error::Error; };

}  // namespace palmid
