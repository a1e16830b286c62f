//! The Lending Club pipeline on a handful of rows in the raw export format:
//! status encoding, derived features and a chronological train/test split.
//!
//!     cargo run --example lending_club [path/to/accepted_loans.csv]

use driftgate::dataset::{
    encode_loan_status, lending_club_raw_schema, load_csv, load_csv_reader, preprocess_lending_club, split_by_month,
    summarize, MonthStamp,
};

const SAMPLE: &str = "\
loan_amnt,term,int_rate,installment,emp_length,dti,earliest_cr_line,open_acc,pub_rec,revol_util,total_acc,mort_acc,pub_rec_bankruptcies,annual_inc,revol_bal,fico_range_low,fico_range_high,sub_grade,home_ownership,verification_status,initial_list_status,purpose,addr_state,application_type,loan_status,issue_d
10000, 36 months,10.5%,325.1,10+ years,18.2,Aug-2003,9,0,45.1%,22,1,0,65000,12000,700,704,B3,MORTGAGE,Verified,w,debt_consolidation,CA,Individual,Fully Paid,Jan-2018
24000, 60 months,17.9%,608.0,< 1 year,27.5,Mar-2011,14,1,78.0%,30,0,1,52000,20100,665,669,D2,RENT,Source Verified,f,credit_card,TX,Individual,Charged Off,Mar-2018
5000, 36 months,7.2%,154.9,3 years,9.8,Jun-1998,5,0,12.3%,15,3,0,98000,3100,760,764,A3,OWN,Not Verified,w,home_improvement,NY,Individual,Fully Paid,Jul-2018
15000, 36 months,13.6%,509.6,n/a,22.0,Nov-2007,11,0,55.5%,25,2,0,41000,15300,690,694,C1,RENT,Verified,w,debt_consolidation,FL,Joint App,Current,Dec-2018
12000, 60 months,21.0%,324.6,6 years,31.0,Jan-2014,7,2,91.2%,12,0,1,38000,9000,660,664,E1,RENT,Verified,f,other,OH,Individual,Charged Off,Feb-2019
8000, 36 months,9.4%,256.0,2 years,14.4,Sep-2005,10,0,30.0%,19,1,0,72000,7600,720,724,B1,MORTGAGE,Not Verified,w,car,WA,Individual,Fully Paid,Aug-2019
";

fn main() -> driftgate::Result<()> {
    let schema = lending_club_raw_schema();
    let raw = match std::env::args().nth(1) {
        Some(path) => load_csv(&path, &schema)?,
        None => load_csv_reader(SAMPLE.as_bytes(), &schema)?,
    };
    let labelled = encode_loan_status(&raw)?;
    println!("{} raw rows, {} with a final status", raw.n_rows(), labelled.n_rows());

    let features = preprocess_lending_club(&labelled)?;
    println!("{} model features", features.schema().columns().len());
    for s in summarize(&features).iter().filter(|s| {
        ["emp_length", "fico_score", "log_annual_inc", "earliest_cr_line", "loan_status"].contains(&s.name.as_str())
    }) {
        println!("  {:<18} mean {:>9.3}  min {:>9.3}  max {:>9.3}", s.name, s.mean.unwrap_or(f64::NAN), s.min.unwrap_or(f64::NAN), s.max.unwrap_or(f64::NAN));
    }

    let (train, test) = split_by_month(&features, MonthStamp::new(2019, 7)?)?;
    println!("train rows {} (before 2019-07), test rows {}", train.n_rows(), test.n_rows());
    Ok(())
}
