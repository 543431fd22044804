#include "finegrain/report_corpus.hpp"

namespace finegrain {

namespace {

const Polarity kAty = Polarity::Atypical;
const Polarity kTyp = Polarity::Typical;
const Dimension kSev = Dimension::Severity;
const Dimension kChg = Dimension::Change;

}  // namespace

const std::vector<ReportExample>& report_corpus() {
  static const std::vector<ReportExample> corpus = {
      {"There is a new trace pleural effusion on the left.", kAty, kSev, "trace"},
      {"There is a small right pleural effusion and atelectasis at the right lung base.", kAty, kSev, "small"},
      {"There is scattered atelectasis and there are tiny bilateral pleural effusions.", kAty, kSev, "tiny"},
      {"The right hemithorax segmental atelectasis adjacent to the minor fissure is stable.", kAty, kSev,
       "minor"},
      {"Lung volumes are improved with minimal bibasilar atelectasis.", kAty, kSev, "minimal"},
      {"There is mild pulmonary vascular congestion and interstitial edema.", kAty, kSev, "mild"},
      {"In comparison with the study of ___, there is continued substantial cardiomegaly with "
       "mild-to-moderate pulmonary edema.",
       kAty, kSev, "mild-to-moderate"},
      {"There is a large heterogeneous consolidation of the right lower lung with air bronchograms "
       "compatible with pneumonia.",
       kTyp, kSev, "large"},
      {"Frontal and lateral radiographs of the chest demonstrate persistent massive left-sided pleural "
       "effusion, occupying at least two-thirds of the left hemithorax.",
       kTyp, kSev, "massive"},
      {"Diffuse bilateral pulmonary opacifications are again seen, consistent with substantial pulmonary "
       "edema.",
       kTyp, kSev, "substantial"},
      {"There continues to be a moderate left effusion.", kTyp, kSev, "moderate"},
      {"There is interval development of moderate-to-severe interstitial pulmonary edema with some element "
       "of alveolar edema and bilateral pleural effusions,",
       kTyp, kSev, "moderate-to-severe"},
      {"Acute pulmonary congestion with central pulmonary edema and left-sided pleural effusion.", kTyp,
       kSev, "acute"},
      {"Very severe pulmonary consolidation is seen in the right lung.", kTyp, kSev, "severe"},
      {"Since ___, the volume of consolidation in the right mid and lower lung zone has decreased and "
       "pulmonary edema has largely cleared.",
       kAty, kChg, "clear"},
      {"Cardiomegaly is accompanied by improved pulmonary vascular congestion and near resolution of "
       "interstitial edema.",
       kAty, kChg, "resolution"},
      {"The left hemidiaphragm and left costophrenic sulcus are now better defined, suggesting interval "
       "improvement in the left lower lobe collapse/consolidation.",
       kAty, kChg, "improve"},
      {"As compared to the previous radiograph, the signs of interstitial lung edema have decreased in "
       "extent and severity.",
       kAty, kChg, "decrease"},
      {"There is interval progression of vascular congestion and interstitial pulmonary edema.", kTyp, kChg,
       "progress"},
      {"Moderate to severe pulmonary edema has worsened.", kTyp, kChg, "worsen"},
      {"Since the chest radiographs obtained 3 days prior, there has been a significant increase in left "
       "lung atelectasis with leftward mediastinal shift.",
       kTyp, kChg, "increase"},
  };
  return corpus;
}

std::vector<const char*> corpus_sentences(Polarity subcategory) {
  std::vector<const char*> out;
  for (const auto& row : report_corpus()) {
    if (row.subcategory == subcategory) out.push_back(row.text);
  }
  return out;
}

}  // namespace finegrain
