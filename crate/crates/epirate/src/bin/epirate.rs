fn main() {
    std::process::exit(epirate::cli::run(std::env::args_os()));
}
